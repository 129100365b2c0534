#ifndef PCENS_FIGURES_HPP
#define PCENS_FIGURES_HPP

// The four standard exponent plots: error exponents against the code rate at
// q = 2, eps = 1/4. Builders return validated series; the CSV writer emits a
// provenance comment, a header row, and 12-significant-digit values.

#include <pcens/exponents.hpp>
#include <pcens/rational.hpp>

#include <cmath>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pcens {

struct FigureSeries {
    std::string label;          // column header, e.g. "t_ld(ell=2)"
    std::string function_name;  // "t_ld", "t_ld_star" or "s_ud"
    unsigned q = 0;
    double epsilon = 0.0;
    long ell = -1;        // list exponent when the series has one
    long list_size = -1;  // explicit list size when the series has one
    std::vector<std::pair<double, double>> points;  // (rate, value)
};

struct Figure {
    int id = 0;
    std::string parameters;  // echoed into the CSV comment line
    std::vector<FigureSeries> series;
};

namespace detail {

inline void validate_series(const FigureSeries& s) {
    double prev = -1.0;
    for (const auto& [rate, value] : s.points) {
        if (!(rate > prev)) throw std::logic_error("figure rates must increase strictly");
        if (!std::isfinite(value) || value < 0.0)
            throw std::logic_error("figure values must be finite and nonnegative");
        prev = rate;
    }
}

inline std::vector<double> rate_grid(double step) {
    if (!(step > 0.0 && step < 1.0)) throw std::invalid_argument("grid step must lie in (0,1)");
    std::vector<double> grid;
    for (std::size_t k = 1; static_cast<double>(k) * step < 1.0 - 1e-12; ++k)
        grid.push_back(static_cast<double>(k) * step);
    return grid;
}

}  // namespace detail

inline constexpr double kDefaultFigureStep = 1.0 / 500.0;

// id 1: unique-decoding and list-decoding exponents, list exponents 0, 1, 2.
// id 2: list exponent 2 against the explicit list-size-4 exponent.
// id 3: list exponent 3 against the explicit list-size-8 exponent.
// id 4: the variance exponent.
inline Figure build_figure(int id, double step = kDefaultFigureStep) {
    const unsigned q = 2;
    const double eps = 0.25;
    const auto grid = detail::rate_grid(step);

    Figure fig;
    fig.id = id;
    fig.parameters = "q=2 eps=0.25 step=" + format_double(step);

    const auto ld_series = [&](long ell) {
        FigureSeries s;
        s.label = "t_ld(ell=" + std::to_string(ell) + ")";
        s.function_name = "t_ld";
        s.q = q;
        s.epsilon = eps;
        s.ell = ell;
        for (double rate : grid) s.points.emplace_back(rate, t_ld({q, rate, eps, ell}).value);
        return s;
    };
    const auto star_series = [&](long list_size) {
        FigureSeries s;
        s.label = "t_ld_star(L=" + std::to_string(list_size) + ")";
        s.function_name = "t_ld_star";
        s.q = q;
        s.epsilon = eps;
        s.list_size = list_size;
        for (double rate : grid) s.points.emplace_back(rate, t_ld_star(q, list_size, rate, eps));
        return s;
    };

    switch (id) {
        case 1:
            for (long ell : {0L, 1L, 2L}) fig.series.push_back(ld_series(ell));
            break;
        case 2:
            fig.series.push_back(ld_series(2));
            fig.series.push_back(star_series(4));
            break;
        case 3:
            fig.series.push_back(ld_series(3));
            fig.series.push_back(star_series(8));
            break;
        case 4: {
            FigureSeries s;
            s.label = "s_ud";
            s.function_name = "s_ud";
            s.q = q;
            s.epsilon = eps;
            for (double rate : grid) s.points.emplace_back(rate, s_ud(q, rate, eps).value);
            fig.series.push_back(s);
            break;
        }
        default:
            throw std::invalid_argument("figure id must be 1, 2, 3 or 4");
    }
    for (const auto& s : fig.series) detail::validate_series(s);
    return fig;
}

// All series of one figure share the rate grid, so they go out as columns.
inline void write_figure_csv(std::ostream& os, const Figure& fig) {
    os << "# source: figure " << fig.id << " parameters " << fig.parameters << "\n";
    os << "R";
    for (const auto& s : fig.series) os << ',' << s.label;
    os << '\n';
    const std::size_t rows = fig.series.front().points.size();
    for (const auto& s : fig.series)
        if (s.points.size() != rows) throw std::logic_error("figure series length mismatch");
    for (std::size_t k = 0; k < rows; ++k) {
        os << format_double(fig.series.front().points[k].first);
        for (const auto& s : fig.series) os << ',' << format_double(s.points[k].second);
        os << '\n';
    }
}

}  // namespace pcens

#endif

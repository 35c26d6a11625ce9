#include "levylt/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "levylt/errors.hpp"

namespace levylt {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Segment {
    double a;
    double b;
    double value;
    double error;
    double floor;  ///< rounding-error level 50·eps·∫|f|
};

struct ByError {
    bool operator()(const Segment& l, const Segment& r) const { return l.error < r.error; }
};

// One 21-point Kronrod panel with the embedded 10-point Gauss estimate and
// the QUADPACK error heuristic.
Segment gk21(const Integrand& f, double a, double b) {
    using kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
    using gauss = boost::math::quadrature::gauss<double, 10>;
    const auto& xk = kronrod::abscissa();
    const auto& wk = kronrod::weights();
    const auto& wg = gauss::weights();

    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    double fv[21];
    fv[0] = f(center);
    for (std::size_t i = 1; i < xk.size(); ++i) {
        fv[2 * i - 1] = f(center - half * xk[i]);
        fv[2 * i] = f(center + half * xk[i]);
    }

    double kron = fv[0] * wk[0];
    double gs = 0.0;
    double resabs = std::abs(fv[0]) * wk[0];
    for (std::size_t i = 1; i < xk.size(); ++i) {
        const double pair = fv[2 * i - 1] + fv[2 * i];
        kron += pair * wk[i];
        resabs += (std::abs(fv[2 * i - 1]) + std::abs(fv[2 * i])) * wk[i];
        if (i % 2 == 1) gs += pair * wg[i / 2];
    }
    const double mean = 0.5 * kron;
    double resasc = std::abs(fv[0] - mean) * wk[0];
    for (std::size_t i = 1; i < xk.size(); ++i) {
        resasc += (std::abs(fv[2 * i - 1] - mean) + std::abs(fv[2 * i] - mean)) * wk[i];
    }

    const double value = kron * half;
    resabs *= std::abs(half);
    resasc *= std::abs(half);
    double err = std::abs((kron - gs) * half);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) err = std::max(50.0 * kEps * resabs, err);
    if (!std::isfinite(value)) err = std::numeric_limits<double>::infinity();
    return {a, b, value, err, 50.0 * kEps * resabs};
}

[[noreturn]] void fail(std::string_view label, const char* what, double value, double error) {
    std::ostringstream msg;
    msg.precision(17);
    msg << label << ": " << what << " (value " << value << ", error estimate " << error << ")";
    throw NumericalError(msg.str(), value, error);
}

}  // namespace

QuadResult integrate_adaptive(const Integrand& f, double a, double b, double abs_tol,
                              double rel_tol, int max_subdivisions, std::string_view label) {
    const double pts[2] = {a, b};
    return integrate_adaptive(f, std::span<const double>(pts), abs_tol, rel_tol, max_subdivisions,
                              label);
}

QuadResult integrate_adaptive(const Integrand& f, std::span<const double> breakpoints,
                              double abs_tol, double rel_tol, int max_subdivisions,
                              std::string_view label) {
    if (breakpoints.size() < 2) return {};
    std::priority_queue<Segment, std::vector<Segment>, ByError> heap;
    long evals = 0;
    double total = 0.0;
    double total_err = 0.0;
    double floor = 0.0;
    auto resum = [&] {
        auto copy = heap;
        total = 0.0;
        total_err = 0.0;
        floor = 0.0;
        while (!copy.empty()) {
            total += copy.top().value;
            total_err += copy.top().error;
            floor += copy.top().floor;
            copy.pop();
        }
    };
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (breakpoints[i + 1] == breakpoints[i]) continue;
        heap.push(gk21(f, breakpoints[i], breakpoints[i + 1]));
        evals += 21;
    }
    resum();
    if (!std::isfinite(total)) fail(label, "non-finite integrand", total, total_err);

    // The requested tolerance, or twice the accumulated rounding level when
    // that is larger: below it bisection only reshuffles rounding noise.
    auto target = [&] { return std::max({abs_tol, rel_tol * std::abs(total), 2.0 * floor}); };
    const std::size_t limit = heap.size() + static_cast<std::size_t>(std::max(max_subdivisions, 1));
    int since_resum = 0;
    while (total_err > target() && heap.size() < limit) {
        Segment worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        // Panel at the resolution of doubles: further bisection cannot help.
        if (mid <= worst.a || mid >= worst.b ||
            (worst.b - worst.a) < 4.0 * kEps * std::max(std::abs(worst.a), std::abs(worst.b))) {
            break;
        }
        heap.pop();
        Segment left = gk21(f, worst.a, mid);
        Segment right = gk21(f, mid, worst.b);
        evals += 42;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        floor += left.floor + right.floor - worst.floor;
        heap.push(left);
        heap.push(right);
        if (++since_resum == 64) {
            // Incremental updates drift; refresh the sums from the heap.
            since_resum = 0;
            resum();
        }
    }
    resum();
    if (!std::isfinite(total)) fail(label, "non-finite integrand", total, total_err);
    // Within three orders of the target the estimate is returned with its
    // error; beyond that the integral is reported as failed.
    if (total_err > 1e3 * target()) fail(label, "adaptive quadrature did not converge", total, total_err);
    return {total, total_err, evals};
}

QuadResult integrate_decaying_tail(const Integrand& f, double a, const QuadratureConfig& cfg,
                                   std::string_view label) {
    if (!(a > 0.0)) throw DomainError(std::string(label) + ": tail start must be positive");
    const auto g = [&](double u) {
        const double p = a * std::exp(u);
        return f(p) * p;
    };
    const double floor = cfg.abs_tol * 1e-2;
    double upper = 8.0;
    while (upper < 640.0 && std::abs(g(upper)) > floor) upper = std::min(2.0 * upper, 640.0);

    std::vector<double> pts{0.0};
    for (double u = 1.0; u < upper; u *= 2.0) pts.push_back(u);
    pts.push_back(upper);
    QuadResult res = integrate_adaptive(g, pts, cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions, label);

    // Remainder beyond `upper`, assuming exponential decay in u.
    const double g_end = g(upper);
    if (g_end != 0.0) {
        const double g_prev = g(upper - 1.0);
        const double rate = std::log(std::abs(g_prev) / std::abs(g_end));
        if (rate > 0.0 && std::isfinite(rate)) {
            res.value += g_end / rate;
            res.error += std::abs(g_end / rate) * 0.1;
        } else {
            res.error += std::abs(g_end) * upper;
        }
    }
    return res;
}

std::pair<double, double> wynn_epsilon(std::span<const double> sums) {
    const std::size_t n = sums.size();
    if (n == 0) return {0.0, std::numeric_limits<double>::infinity()};
    if (n < 3) {
        const double err = n == 2 ? std::abs(sums[1] - sums[0]) : std::numeric_limits<double>::infinity();
        return {sums.back(), err};
    }
    std::vector<double> prev(n + 1, 0.0);
    std::vector<double> cur(sums.begin(), sums.end());
    double best = cur.back();
    double best_err = std::abs(cur[n - 1] - cur[n - 2]);
    double scale = 0.0;
    for (double s : sums) scale = std::max(scale, std::abs(s));

    for (std::size_t col = 1; cur.size() > 1; ++col) {
        std::vector<double> next(cur.size() - 1);
        for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
            const double diff = cur[i + 1] - cur[i];
            if (std::abs(diff) <= 1e-15 * std::max(scale, std::numeric_limits<double>::min())) {
                // Column has converged to rounding; the even column is the answer.
                if (col % 2 == 1) return {cur[i + 1], std::abs(diff)};
                return {best, best_err};
            }
            next[i] = prev[i + 1] + 1.0 / diff;
        }
        if (col % 2 == 0) {
            if (!std::isfinite(next.back())) break;
            const double err = std::abs(next.back() - best);
            best = next.back();
            best_err = err;
        }
        prev = std::move(cur);
        cur = std::move(next);
    }
    return {best, best_err};
}

QuadResult half_line_integral(const Integrand& head, std::span<const OscillatoryTerm> terms,
                              double head_end, const QuadratureConfig& cfg, std::string_view label) {
    double omega_max = 0.0;
    for (const auto& t : terms) omega_max = std::max(omega_max, std::abs(t.omega));

    std::vector<double> pts{0.0};
    if (omega_max > 0.0) {
        const double panels = std::min(8192.0, std::ceil(head_end * omega_max / M_PI));
        const auto count = static_cast<int>(std::max(1.0, panels));
        for (int i = 1; i < count; ++i) pts.push_back(head_end * i / count);
    }
    pts.push_back(head_end);
    QuadResult total = integrate_adaptive(head, pts, cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions, label);

    const double negligible = cfg.abs_tol * 1e-2;
    for (const auto& term : terms) {
        const double a0 = std::abs(term.amplitude(head_end));
        const double a1 = std::abs(term.amplitude(2.0 * head_end));
        if ((a0 + a1) * head_end < negligible && a1 <= a0) continue;

        const double omega = std::abs(term.omega);
        if (omega == 0.0) {
            const double c = std::cos(term.phase);
            if (c == 0.0) continue;
            QuadResult t = integrate_decaying_tail(term.amplitude, head_end, cfg, label);
            total.value += c * t.value;
            total.error += std::abs(c) * t.error;
            total.evaluations += t.evaluations;
            continue;
        }

        const double width = M_PI / omega;
        const auto panel_fn = [&](double p) { return term.amplitude(p) * std::cos(omega * p - term.phase); };
        std::vector<double> sums;
        double running = 0.0;
        double last_estimate = std::numeric_limits<double>::quiet_NaN();
        double tail_value = std::numeric_limits<double>::quiet_NaN();
        double tail_error = 0.0;
        int stable_rounds = 0;
        for (int k = 0; k < cfg.max_tail_panels; ++k) {
            const double lo = head_end + k * width;
            const double hi = lo + width;
            QuadResult panel = integrate_adaptive(panel_fn, lo, hi, cfg.abs_tol * 1e-2, 1e-14, 64, label);
            total.evaluations += panel.evaluations;
            running += panel.value;
            sums.push_back(running);

            const double amp_hi = std::abs(term.amplitude(hi));
            if (std::abs(panel.value) < negligible && amp_hi * width < negligible) {
                tail_value = running;
                tail_error = std::abs(panel.value);
                break;
            }
            if (sums.size() >= 6) {
                const std::size_t window = std::min<std::size_t>(sums.size(), 40);
                auto [est, err] = wynn_epsilon(std::span<const double>(sums).last(window));
                const double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(est));
                if (std::isfinite(last_estimate) && std::abs(est - last_estimate) <= tol && err <= 10 * tol) {
                    if (++stable_rounds >= 2) {
                        tail_value = est;
                        tail_error = std::max(err, std::abs(est - last_estimate));
                        break;
                    }
                } else {
                    stable_rounds = 0;
                }
                last_estimate = est;
            }
        }
        if (!std::isfinite(tail_value)) fail(label, "oscillatory tail did not converge", total.value + running, std::abs(running));
        total.value += tail_value;
        total.error += tail_error;
    }
    return total;
}

}  // namespace levylt

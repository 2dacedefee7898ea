// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>

#include "bdpz/bounds.hpp"
#include "bdpz/simulate.hpp"
#include "bdpz/solver.hpp"
#include "oracles.hpp"

using namespace bdpz;
using oracle::Big;

namespace {

struct Example {
    const char* name;
    RateModel m;
    WeightSequence d, d_star;
    Big beta_exact, beta_star_exact;
    double reported_distance;
    std::function<Big(std::int64_t)> dj, dsj;
};

std::vector<Example> examples() {
    auto mirror = [](Big r) {
        return [r](std::int64_t j) {
            return boost::multiprecision::pow(r, static_cast<int>((j < 0 ? -j : j) - 1));
        };
    };
    auto two_sided = [](Big r) {
        return [r](std::int64_t j) {
            const Big g = boost::multiprecision::pow(r, static_cast<int>((j < 0 ? -j : j) - 1));
            return j < 0 ? 2 * g : g;
        };
    };
    const Big r2 = boost::multiprecision::sqrt(Big(2));
    return {{"ex1", example1(), WeightSequence::mirror_geometric(8.0 / 7.0),
             WeightSequence::mirror_geometric(4.0 / 3.0), Big(13) / 28, Big(1) / 3, 2e-8,
             mirror(Big(8) / 7), mirror(Big(4) / 3)},
            {"ex2", example2(), WeightSequence::two_sided(2.0, 8.0 / 7.0),
             WeightSequence::two_sided(2.0, std::sqrt(2.0)), Big(3) / 32,
             (r2 - 1) * (Big(7) / 4 / r2 - Big(7) / 8), 1e-7, two_sided(Big(8) / 7),
             two_sided(r2)}};
}

EnvelopeConstants envelope(const Example& ex, bool star) {
    return fit_envelope(ex.m, star ? ex.d_star : ex.d, EnvelopeStrategy::pointwise, 1.0);
}

double theorem2_at(const Example& ex, State n) {
    return theorem2_bound(ex.m, ex.d, ex.d_star, envelope(ex, false), envelope(ex, true), -n, n)
        .value;
}

ProbabilitySnapshot at_time(const RateModel& m, Window w, double t, double dt = 0.0) {
    const double step = dt > 0.0 ? dt : default_step(m);
    return integrate(m, w, ProbabilitySnapshot::delta(w, 0), t, step, t).back();
}

int failures = 0;

void report(int id, const std::string& title, bool pass, double seconds, double limit,
            const std::string& detail) {
    const bool in_time = seconds < limit;
    const bool ok = pass && in_time;
    if (!ok) ++failures;
    std::printf("[%s] criterion %d: %s | %s | %.2f s (limit %.0f s)\n", ok ? "PASS" : "FAIL", id,
                title.c_str(), detail.c_str(), seconds, limit);
    std::fflush(stdout);
}

template <class F>
double timed(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

void criterion1(const std::vector<Example>& exs) {
    for (const auto& ex : exs) {
        bool pass = true;
        std::string detail;
        const double s = timed([&] {
            const auto e = envelope(ex, false);
            const double want = static_cast<double>(ex.beta_exact);
            pass = std::abs(e.beta - want) <= 1e-9 && e.M == 1.0;
            detail = std::string(ex.name) + " beta=" + fmt("%.15g", e.beta) + " M=" + fmt("%g", e.M);
            if (std::string(ex.name) == "ex1") {
                const auto es = envelope(ex, true);
                pass = pass && std::abs(es.beta - 1.0 / 3.0) <= 1e-9 && es.M == 1.0;
                detail += " beta*=" + fmt("%.15g", es.beta) + " M*=" + fmt("%g", es.M);
            }
        });
        report(1, "envelope constants", pass, s, 1.0, detail);
    }
}

void criterion2(const std::vector<Example>& exs) {
    for (const auto& ex : exs) {
        bool pass = false;
        std::string detail;
        const double s = timed([&] {
            const double got = theorem2_at(ex, 150);
            const auto ub0 = ex.m.upper_bounds(0);
            oracle::TruncationInputs in{ex.dj, ex.dsj, 1, 1, ex.beta_exact, ex.beta_star_exact,
                                      Big(ub0.birth), Big(ub0.death),
                                      Big(ex.m.upper_bounds(150).birth),
                                      Big(ex.m.upper_bounds(-150).death), -150, 150};
            const double want = static_cast<double>(oracle::theorem2_bound(in));
            const double rel = std::abs(got - want) / want;
            pass = got <= 1e-6 && rel <= 5e-10;
            detail = std::string(ex.name) + " value=" + fmt("%.10e", got) + " oracle=" +
                     fmt("%.10e", want) + " rel=" + fmt("%.1e", rel) + " reported=" +
                     fmt("%.0e", ex.reported_distance) + " ratio=" + fmt("%.3g", got / ex.reported_distance);
        });
        report(2, "truncation bound at N=150", pass, s, 1.0, detail);
    }
}

void criterion3(const std::vector<Example>& exs) {
    for (const auto& ex : exs) {
        bool pass = true;
        std::string detail = ex.name;
        const double s = timed([&] {
            const double bound = theorem2_at(ex, 150);
            const Window small{-150, 150};
            const Window big{-200, 200};
            const double dt = default_step(ex.m);
            const auto a = integrate(ex.m, small, ProbabilitySnapshot::delta(small, 0), 10.0, dt, 1.0);
            const auto b = integrate(ex.m, big, ProbabilitySnapshot::delta(big, 0), 10.0, dt, 1.0);
            for (int t : {1, 5, 10}) {
                const double dist = l1_distance(a.snapshots[t], b.snapshots[t]);
                pass = pass && dist <= bound;
                detail += " t=" + std::to_string(t) + ":" + fmt("%.2e", dist);
            }
            detail += " bound=" + fmt("%.2e", bound);
        });
        report(3, "truncation soundness N=150 vs N=200", pass, s, 60.0, detail);
    }
}

void criterion4() {
    bool pass = true;
    std::string detail;
    const double s = timed([&] {
        const Window w{-400, 400};
        for (const auto& [lam, mu] : {std::pair{1.0, 1.0}, std::pair{2.0, 1.0}}) {
            const auto m = constant_model(lam, mu);
            const auto p = at_time(m, w, 1.0);
            double worst = 0.0;
            for (State k = w.lo; k <= w.hi; ++k)
                worst = std::max(worst, std::abs(p.at(k) - static_cast<double>(
                                                                oracle::skellam_pmf(k, lam, mu))));
            pass = pass && worst <= 1e-8;
            detail += fmt("solver(l=%g", lam) + fmt(",m=%g)", mu) + fmt(" max err %.1e; ", worst);
        }
        const std::uint64_t n = 1000000;
        const auto h = empirical_distribution(constant_model(1.0, 1.0), 0, 1.0, n, 20240601);
        int outside = 0;
        int checked = 0;
        for (State k = h.snapshot.window.lo; k <= h.snapshot.window.hi; ++k) {
            const double p_hat = h.snapshot.at(k);
            if (p_hat < 1e-3) continue;
            ++checked;
            const double se = std::sqrt(p_hat * (1 - p_hat) / static_cast<double>(n));
            if (std::abs(p_hat - static_cast<double>(oracle::skellam_pmf(k, 1.0, 1.0))) > 3 * se) ++outside;
        }
        pass = pass && outside == 0;
        detail += "simulator p0=" + fmt("%.6f", h.snapshot.at(0)) + fmt(" states outside 3se: %g", outside) +
                  fmt(" of %g", checked);
    });
    report(4, "Skellam law", pass, s, 60.0, detail);
}

void criterion5(const std::vector<Example>& exs) {
    for (const auto& ex : exs) {
        bool pass = true;
        std::string detail = ex.name;
        const double s = timed([&] {
            const Window w{-150, 150};
            const double dt = default_step(ex.m);
            const auto p0 = ProbabilitySnapshot::delta(w, 0);
            const auto q0 = ProbabilitySnapshot::delta(w, 5);
            const auto env = envelope(ex, false);
            const auto tp = integrate(ex.m, w, p0, 20.0, dt, 0.2);
            const auto tq = integrate(ex.m, w, q0, 20.0, dt, 0.2);
            // Increases below the roundoff floor of an l1 sum over the window are noise.
            const double floor = static_cast<double>(w.size()) * 2.220446049250313e-16;
            double prev = 2.0;
            double worst_ratio = 0.0;
            bool monotone = true;
            for (std::size_t i = 0; i < tp.snapshots.size(); ++i) {
                const double dist = l1_distance(tp.snapshots[i], tq.snapshots[i]);
                const double bound = theorem1_bound(ex.d, env, p0, q0, tp.snapshots[i].time).value;
                worst_ratio = std::max(worst_ratio, dist / bound);
                monotone = monotone && dist <= prev + floor;
                prev = dist;
            }
            pass = worst_ratio <= 1.0 && monotone && tp.snapshots.size() == 101;
            detail += " outputs=" + std::to_string(tp.snapshots.size()) +
                      fmt(" max dist/bound=%.3f", worst_ratio) + (monotone ? " non-increasing" : " NOT monotone");
        });
        report(5, "contraction delta_0 vs delta_5", pass, s, 60.0, detail);
    }
}

void criterion6(const std::vector<Example>& exs) {
    for (const auto& ex : exs) {
        bool pass = true;
        std::string detail = ex.name;
        const double s = timed([&] {
            const Window w{-150, 150};
            const auto env = envelope(ex, false);
            const auto p0 = ProbabilitySnapshot::delta(w, 0);
            const auto traj = integrate(ex.m, w, p0, 10.0, default_step(ex.m), 1.0);
            double worst = 0.0;
            for (int t : {1, 5, 10})
                for (State n : {5, 10, 20}) {
                    const auto& snap = traj.snapshots[static_cast<std::size_t>(t)];
                    const double tail = left_tail(snap, n) + right_tail(snap, n);
                    const double bound = tail_bound(ex.m, ex.d, env, p0, n, t, TailSide::both).value;
                    worst = std::max(worst, tail / bound);
                    pass = pass && tail <= bound;
                }
            detail += fmt(" max tail/bound=%.3e", worst);
        });
        report(6, "concentration", pass, s, 60.0, detail);
    }
}

void criterion7(const std::vector<Example>& exs) {
    for (const auto& ex : exs) {
        bool pass = true;
        std::string detail = ex.name;
        const double s = timed([&] {
            const Window w{-150, 150};
            const auto cyc = limiting_cycle(ex.m, w, ProbabilitySnapshot::delta(w, 0), 1.0, 1e-7);
            const double detected = cyc.period.back().time;
            double mean_lo = 1e300;
            double mean_hi = -1e300;
            bool finite = true;
            for (const auto& mo : cyc.period.moments) {
                finite = finite && std::isfinite(mo.variance);
                mean_lo = std::min(mean_lo, mo.mean);
                mean_hi = std::max(mean_hi, mo.mean);
            }
            // Period-to-period variance drift, followed one period at a time from detection.
            Trajectory current = cyc.period;
            double drift = std::numeric_limits<double>::infinity();
            double stable_at = detected;
            while (stable_at < 150.0) {
                const auto next = integrate(ex.m, w, current.back(), stable_at + 1.0,
                                            default_step(ex.m), 0.01);
                drift = 0.0;
                for (std::size_t i = 0; i < next.moments.size(); ++i) {
                    finite = finite && std::isfinite(next.moments[i].variance);
                    drift = std::max(drift, std::abs(next.moments[i].variance - current.moments[i].variance));
                }
                stable_at = next.back().time;
                current = next;
                if (drift < 1e-6) break;
            }
            pass = detected < 150.0 && finite && drift < 1e-6 && stable_at <= 150.0;
            if (std::string(ex.name) == "ex1") pass = pass && mean_lo >= -0.5 && mean_hi <= 0.5;
            detail += fmt(" l1 tol 1e-7 reached by t=%g", detected) + fmt(" mean in [%.3g,", mean_lo) +
                      fmt(" %.3g]", mean_hi) + fmt(" variance drift %.1e", drift) +
                      fmt(" by t=%g", stable_at);
        });
        report(7, "limiting regime", pass, s, 120.0, detail);
    }
}

void criterion8() {
    bool pass = true;
    std::string detail;
    const double s = timed([&] {
        const Window w{-400, 400};
        const auto m = constant_model(2.0, 1.0);
        std::vector<double> errs;
        for (double dt : {1.0 / 64, 1.0 / 128, 1.0 / 256}) {
            const auto p = at_time(m, w, 1.0, dt);
            double e = 0.0;
            for (State k = w.lo; k <= w.hi; ++k)
                e = std::max(e, std::abs(p.at(k) - static_cast<double>(oracle::skellam_pmf(k, 2.0, 1.0))));
            errs.push_back(e);
        }
        for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
            const double ratio = errs[i] / errs[i + 1];
            pass = pass && ratio >= 13.0 && ratio <= 19.0;
            detail += fmt("ratio %.2f ", ratio);
        }
        detail += fmt("(errors %.2e", errs[0]) + fmt(" %.2e", errs[1]) + fmt(" %.2e)", errs[2]);
    });
    report(8, "RK4 order (Richardson)", pass, s, 60.0, detail);
}

}  // namespace

int main() {
    const auto exs = examples();
    criterion1(exs);
    criterion2(exs);
    criterion3(exs);
    criterion4();
    criterion5(exs);
    criterion6(exs);
    criterion7(exs);
    criterion8();
    std::printf("%d failure(s)\n", failures);
    return failures == 0 ? 0 : 1;
}

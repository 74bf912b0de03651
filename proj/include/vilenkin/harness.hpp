#pragma once

#include "vilenkin/decomposition.hpp"
#include "vilenkin/operators.hpp"
#include "vilenkin/system.hpp"
#include "vilenkin/transform.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

// Randomized experiments around the one-sided square-function inequalities.
//
// Everything here is deterministic in the configured seed: the samplers draw
// raw 64-bit words from a fixed engine and shape them with explicit
// arithmetic, so identical configs reproduce identical reports bit for bit
// across platforms.  Reported bounds are empirical observations, never
// asserted constants.

namespace vilenkin {

// Deterministic sampler over a fixed-width engine.  std::*_distribution is
// implementation-defined, so the shaping steps are spelled out here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // Uniform on [0, n); rejection keeps it unbiased.
    std::int64_t below(std::int64_t n) {
        if (n <= 0) throw std::invalid_argument("Rng::below: bound must be positive");
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit =
            std::numeric_limits<std::uint64_t>::max() -
            std::numeric_limits<std::uint64_t>::max() % bound;
        for (;;) {
            const std::uint64_t r = next();
            if (r < limit) return static_cast<std::int64_t>(r % bound);
        }
    }

    // Uniform on [0, 1) with 53 significant bits.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; one value per pair of draws.
    double normal() {
        const double u = 1.0 - unit();  // (0, 1]
        const double v = unit();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
    }

    // Complex standard Gaussian, E|z|^2 = 1.
    cplx gaussian() { return cplx{normal(), normal()} / std::numbers::sqrt2; }

    cplx unimodular() { return std::polar(1.0, 2.0 * std::numbers::pi * unit()); }

private:
    std::mt19937_64 eng_;
};

inline std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

enum class CoefficientKind { gaussian, unimodular };

struct CoefficientLaw {
    CoefficientKind kind = CoefficientKind::gaussian;
    double scale = 1.0;
};

enum class RatioTarget { rdf, hardy, square_function };

// For an empty exponent list estimate_constant falls back to the default
// grid for the chosen target.
inline std::vector<double> default_exponents(RatioTarget target) {
    if (target == RatioTarget::hardy)
        return {0.5, 0.75, 1.0, 1.01, 1.1, 1.25, 1.5, 1.75, 2.0};
    return {1.01, 1.1, 1.25, 1.5, 1.75, 2.0};
}

struct TrialConfig {
    std::vector<int> radices;
    std::vector<double> exponents;
    std::int64_t min_intervals = 1;
    std::int64_t max_intervals = 4;
    CoefficientLaw law;
    std::int64_t trials = 1000;
    std::uint64_t seed = 1;
    bool adversarial = false;
    std::int64_t adversarial_iterations = 0;
    int restarts = 3;
    RatioTarget target = RatioTarget::rdf;
};

inline void validate_config(const TrialConfig& cfg) {
    const SystemSpec spec(cfg.radices);  // throws on bad radices
    // an empty exponent list means the default grid for the target
    for (const double p : cfg.exponents)
        if (!(p > 0.0) || p > 2.0)
            throw std::invalid_argument("TrialConfig: exponents must lie in (0, 2]");
    if (cfg.trials < 1) throw std::invalid_argument("TrialConfig: trials must be positive");
    if (cfg.min_intervals < 1 || cfg.min_intervals > cfg.max_intervals)
        throw std::invalid_argument("TrialConfig: need 1 <= min_intervals <= max_intervals");
    if (2 * cfg.max_intervals > spec.atom_count() + 1)
        throw std::invalid_argument(
            "TrialConfig: max_intervals needs more breakpoints than [0, m_K] offers");
    if (cfg.law.scale < 0.0)
        throw std::invalid_argument("TrialConfig: coefficient scale must be nonnegative");
    if (cfg.restarts < 1) throw std::invalid_argument("TrialConfig: restarts must be positive");
    if (cfg.adversarial_iterations < 0)
        throw std::invalid_argument("TrialConfig: adversarial iterations must be nonnegative");
}

// count pairwise disjoint nonempty intervals from sorted distinct breakpoints
// in [0, m_K]; 2*count of them must fit, or the request is rejected.
inline std::vector<IntervalZ> gen_interval_family(Rng& rng, const SystemSpec& spec,
                                                  std::int64_t count) {
    if (count < 1) throw std::invalid_argument("gen_interval_family: count must be positive");
    if (2 * count > spec.atom_count() + 1)
        throw std::invalid_argument("gen_interval_family: not enough breakpoints in [0, m_K]");
    std::set<std::int64_t> points;
    while (static_cast<std::int64_t>(points.size()) < 2 * count)
        points.insert(rng.below(spec.atom_count() + 1));
    std::vector<IntervalZ> out;
    for (auto it = points.begin(); it != points.end();) {
        const std::int64_t a = *it++;
        const std::int64_t b = *it++;
        out.push_back(IntervalZ{a, b});
    }
    return out;
}

inline std::vector<IntervalZ> gen_interval_family(std::uint64_t seed, const SystemSpec& spec,
                                                  std::int64_t count) {
    Rng rng(seed);
    return gen_interval_family(rng, spec, count);
}

// One member per interval, coefficients drawn on the interval only.
inline SpectrumFamily gen_polynomial_family(Rng& rng, const std::vector<IntervalZ>& intervals,
                                            const CoefficientLaw& law, const SystemSpec& spec) {
    SpectrumFamily fam;
    for (const IntervalZ& seg : intervals) {
        validate_interval(seg, spec);
        Spectrum F;
        F.coeffs.assign(static_cast<std::size_t>(spec.atom_count()), cplx{});
        for (std::int64_t n = seg.a; n < seg.b; ++n)
            F.coeffs[static_cast<std::size_t>(n)] =
                law.scale * (law.kind == CoefficientKind::gaussian ? rng.gaussian()
                                                                   : rng.unimodular());
        fam.members.push_back(std::move(F));
    }
    return fam;
}

inline SpectrumFamily gen_polynomial_family(std::uint64_t seed,
                                            const std::vector<IntervalZ>& intervals,
                                            const CoefficientLaw& law, const SystemSpec& spec) {
    Rng rng(seed);
    return gen_polynomial_family(rng, intervals, law, spec);
}

// ||sum_s f_s||_p / ||(sum_s |f_s|^2)^(1/2)||_p, the one-sided comparison of
// a disjointly supported family against its square function.
inline double rdf_ratio(const SpectrumFamily& fam, double p, const SystemSpec& spec) {
    detail::check_exponent(p, "rdf_ratio");
    const double denom = lp_l2_norm(fam, p, spec);
    if (denom == 0.0) throw std::invalid_argument("rdf_ratio: family vanishes");
    Spectrum sum{std::vector<cplx>(static_cast<std::size_t>(spec.atom_count()), cplx{})};
    for (const Spectrum& member : fam.members) {
        detail::check_spectrum(member, spec, "rdf_ratio");
        for (std::size_t n = 0; n < sum.coeffs.size(); ++n) sum.coeffs[n] += member.coeffs[n];
    }
    return lp_norm(fast_inverse(sum, spec), p) / denom;
}

// ||sum_s f_s||_p over the summed Hardy norms of the endpoint-modulated
// families; evaluated in the padded system because the right endpoints can
// be m_K.
inline double hardy_ratio(const SpectrumFamily& fam, const std::vector<IntervalZ>& intervals,
                          double p, const SystemSpec& spec) {
    detail::check_exponent(p, "hardy_ratio");
    if (fam.members.size() != intervals.size())
        throw std::invalid_argument("hardy_ratio: one interval per member required");
    const SystemSpec wide = spec.padded();
    SpectrumFamily at_start, at_end;
    Spectrum sum{std::vector<cplx>(static_cast<std::size_t>(spec.atom_count()), cplx{})};
    for (std::size_t s = 0; s < fam.members.size(); ++s) {
        detail::check_spectrum(fam.members[s], spec, "hardy_ratio");
        validate_interval(intervals[s], spec);
        const Spectrum padded = detail::zero_extend(fam.members[s], wide);
        at_start.members.push_back(
            modulate_spectrum(padded, intervals[s].a, Modulation::inverse, wide));
        at_end.members.push_back(
            modulate_spectrum(padded, intervals[s].b, Modulation::inverse, wide));
        for (std::size_t n = 0; n < sum.coeffs.size(); ++n)
            sum.coeffs[n] += fam.members[s].coeffs[n];
    }
    const double denom = hardy_norm(at_start, p, wide) + hardy_norm(at_end, p, wide);
    if (denom == 0.0) throw std::invalid_argument("hardy_ratio: family vanishes");
    return lp_norm(fast_inverse(sum, spec), p) / denom;
}

// ||S~ fam||_p / ||fam||_{L^p(l2)} and its martingale counterpart.
inline double square_ratio(const SpectrumFamily& fam, double p, const SystemSpec& spec) {
    const double denom = lp_l2_norm(fam, p, spec);
    if (denom == 0.0) throw std::invalid_argument("square_ratio: family vanishes");
    return lp_norm(square_S_tilde(fam, spec), p) / denom;
}

inline double martingale_square_ratio(const SpectrumFamily& fam, double p,
                                      const SystemSpec& spec) {
    const double denom = lp_l2_norm(fam, p, spec);
    if (denom == 0.0)
        throw std::invalid_argument("martingale_square_ratio: family vanishes");
    return lp_norm(square_S(fam, spec), p) / denom;
}

inline double evaluate_ratio(const SpectrumFamily& fam, const std::vector<IntervalZ>& intervals,
                             double p, RatioTarget target, const SystemSpec& spec) {
    switch (target) {
        case RatioTarget::rdf:
            return rdf_ratio(fam, p, spec);
        case RatioTarget::hardy:
            return hardy_ratio(fam, intervals, p, spec);
        default:
            return square_ratio(fam, p, spec);
    }
}

struct RatioStats {
    double max = 0.0;
    double min = 0.0;
    double mean = 0.0;
    double q50 = 0.0;
    double q90 = 0.0;
    double q99 = 0.0;
};

inline RatioStats summarize(std::vector<double> ratios) {
    if (ratios.empty()) throw std::invalid_argument("summarize: no ratios");
    RatioStats out;
    double acc = 0.0;
    for (const double r : ratios) acc += r;
    out.mean = acc / static_cast<double>(ratios.size());
    std::sort(ratios.begin(), ratios.end());
    out.min = ratios.front();
    out.max = ratios.back();
    const auto rank = [&](double q) {
        const auto idx = static_cast<std::size_t>(q * static_cast<double>(ratios.size() - 1) + 0.5);
        return ratios[idx];
    };
    out.q50 = rank(0.50);
    out.q90 = rank(0.90);
    out.q99 = rank(0.99);
    return out;
}

// Replayable record of the most extreme instance seen.
struct WorstCase {
    double ratio = 0.0;
    std::vector<IntervalZ> intervals;
    std::vector<std::vector<cplx>> coefficients;  // full-length arrays, one per member
};

namespace detail {
inline SpectrumFamily family_of(const WorstCase& inst) {
    SpectrumFamily fam;
    for (const auto& coeffs : inst.coefficients) fam.members.push_back(Spectrum{coeffs});
    return fam;
}
}  // namespace detail

// Keep-if-larger coordinate search around an instance.  Coordinates are
// picked inside the member's own interval so the support constraint is
// preserved.
inline WorstCase hill_climb(WorstCase inst, double p, RatioTarget target, const SystemSpec& spec,
                            std::int64_t iterations, Rng& rng) {
    for (std::int64_t it = 0; it < iterations; ++it) {
        const std::size_t s = static_cast<std::size_t>(rng.below(
            static_cast<std::int64_t>(inst.coefficients.size())));
        const IntervalZ seg = inst.intervals[s];
        const std::int64_t n = seg.a + rng.below(seg.length());

        double ms = 0.0;
        for (std::int64_t i = seg.a; i < seg.b; ++i)
            ms += std::norm(inst.coefficients[s][static_cast<std::size_t>(i)]);
        const double step = 0.5 * std::sqrt(ms / static_cast<double>(seg.length()));
        const cplx delta = (step > 0.0 ? step : 1.0) * rng.gaussian();

        const cplx saved = inst.coefficients[s][static_cast<std::size_t>(n)];
        inst.coefficients[s][static_cast<std::size_t>(n)] += delta;
        const double ratio =
            evaluate_ratio(detail::family_of(inst), inst.intervals, p, target, spec);
        if (ratio > inst.ratio)
            inst.ratio = ratio;
        else
            inst.coefficients[s][static_cast<std::size_t>(n)] = saved;
    }
    return inst;
}

struct ExponentRow {
    double exponent = 2.0;
    RatioStats stats;
    bool has_martingale = false;
    RatioStats martingale_stats;          // square_function target only
    std::int64_t pointwise_violations = 0;  // square_function target only
    WorstCase worst;
    double refined_max = 0.0;
};

struct TrialReport {
    TrialConfig config;
    std::vector<ExponentRow> rows;
    double runtime_ms = 0.0;
};

// Monte Carlo scan of the configured ratio over random families, with an
// optional adversarial refinement of the strongest instances found.  The
// refinement budget is split across hill climbs started from the
// config.restarts best trials.
inline TrialReport estimate_constant(const TrialConfig& input) {
    TrialConfig cfg = input;
    if (cfg.exponents.empty()) cfg.exponents = default_exponents(cfg.target);
    validate_config(cfg);
    if (cfg.law.scale <= 0.0)
        throw std::invalid_argument("estimate_constant: coefficient scale must be positive");
    const SystemSpec spec(cfg.radices);
    const auto started = std::chrono::steady_clock::now();

    TrialReport report;
    report.config = cfg;

    for (std::size_t pi = 0; pi < cfg.exponents.size(); ++pi) {
        const double p = cfg.exponents[pi];
        Rng rng(splitmix(cfg.seed ^ splitmix(static_cast<std::uint64_t>(pi) + 1)));

        ExponentRow row;
        row.exponent = p;
        row.has_martingale = cfg.target == RatioTarget::square_function;

        std::vector<double> ratios;
        std::vector<double> martingale_ratios;
        ratios.reserve(static_cast<std::size_t>(cfg.trials));
        std::vector<WorstCase> best;  // descending by ratio, at most cfg.restarts entries

        const double cap = std::sqrt(static_cast<double>(spec.max_radix() - 1));

        for (std::int64_t trial = 0; trial < cfg.trials; ++trial) {
            std::vector<IntervalZ> intervals;
            if (cfg.target == RatioTarget::square_function) {
                intervals = {IntervalZ{0, spec.atom_count()}};
            } else {
                const std::int64_t count =
                    cfg.min_intervals + rng.below(cfg.max_intervals - cfg.min_intervals + 1);
                intervals = gen_interval_family(rng, spec, count);
            }
            const SpectrumFamily fam = gen_polynomial_family(rng, intervals, cfg.law, spec);
            const double ratio = evaluate_ratio(fam, intervals, p, cfg.target, spec);
            ratios.push_back(ratio);

            if (cfg.target == RatioTarget::square_function) {
                martingale_ratios.push_back(martingale_square_ratio(fam, p, spec));
                const RealSignal s = square_S(fam, spec);
                const RealSignal st = square_S_tilde(fam, spec);
                for (std::size_t j = 0; j < s.size(); ++j)
                    if (s[j] > cap * st[j] + 1e-12) ++row.pointwise_violations;
            }

            if (best.size() < static_cast<std::size_t>(cfg.restarts) ||
                ratio > best.back().ratio) {
                WorstCase inst;
                inst.ratio = ratio;
                inst.intervals = intervals;
                for (const Spectrum& member : fam.members)
                    inst.coefficients.push_back(member.coeffs);
                best.insert(std::upper_bound(best.begin(), best.end(), inst,
                                             [](const WorstCase& x, const WorstCase& y) {
                                                 return x.ratio > y.ratio;
                                             }),
                            std::move(inst));
                if (best.size() > static_cast<std::size_t>(cfg.restarts)) best.pop_back();
            }
        }

        row.stats = summarize(ratios);
        if (row.has_martingale) row.martingale_stats = summarize(martingale_ratios);
        row.worst = best.front();
        row.refined_max = row.stats.max;

        if (cfg.adversarial && cfg.adversarial_iterations > 0) {
            const std::int64_t share = std::max<std::int64_t>(
                1, cfg.adversarial_iterations / static_cast<std::int64_t>(best.size()));
            for (std::size_t r = 0; r < best.size(); ++r) {
                Rng climb_rng(splitmix(cfg.seed ^
                                       splitmix((static_cast<std::uint64_t>(pi) + 1) * 1000 +
                                                static_cast<std::uint64_t>(r))));
                const WorstCase refined =
                    hill_climb(best[r], p, cfg.target, spec, share, climb_rng);
                if (refined.ratio > row.refined_max) {
                    row.refined_max = refined.ratio;
                    row.worst = refined;
                }
            }
        }

        report.rows.push_back(std::move(row));
    }

    report.runtime_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - started)
                            .count();
    return report;
}

// Two-sided empirical record of the refined square-function comparison over
// dense random spectra, per exponent.
inline TrialReport square_ratio_sweep(TrialConfig cfg) {
    cfg.target = RatioTarget::square_function;
    return estimate_constant(cfg);
}

}  // namespace vilenkin

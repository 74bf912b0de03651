#include "vilenkin/decomposition.hpp"
#include "vilenkin/harness.hpp"
#include "vilenkin/operators.hpp"
#include "vilenkin/serialization.hpp"
#include "vilenkin/system.hpp"
#include "vilenkin/transform.hpp"
#include "vilenkin/verification.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

// Integration gate: one line per criterion, exit code counts the failures.
// Tolerances are pinned here on purpose; loosening them is a regression.

using namespace vilenkin;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) { return detail::scientific(v); }

std::string fmt_fixed(double v, int digits = 4) {
    std::ostringstream out;
    out.precision(digits);
    out << std::fixed << v;
    return out.str();
}

Outcome transform_against_reference() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(0x5eedULL);
    double rel = 0.0, round = 0.0;
    for (const auto& radices :
         {std::vector<int>{2, 3, 2}, std::vector<int>{3, 3, 3}, std::vector<int>{2, 3, 4, 2}}) {
        const SystemSpec spec(radices);
        for (int rep = 0; rep < 100; ++rep) {
            Signal f;
            f.values.resize(static_cast<std::size_t>(spec.atom_count()));
            double peak = 0.0;
            for (auto& v : f.values) {
                v = rng.gaussian();
                peak = std::max(peak, std::abs(v));
            }
            const Spectrum fast = fast_forward(f, spec);
            const Spectrum slow = naive_forward(f, spec);
            double mag = 0.0, diff = 0.0;
            for (std::size_t i = 0; i < fast.coeffs.size(); ++i) {
                mag = std::max(mag, std::abs(slow.coeffs[i]));
                diff = std::max(diff, std::abs(fast.coeffs[i] - slow.coeffs[i]));
            }
            rel = std::max(rel, diff / mag);
            const Signal back = fast_inverse(fast, spec);
            for (std::size_t i = 0; i < back.values.size(); ++i)
                round = std::max(round, std::abs(back.values[i] - f.values[i]) / peak);
        }
    }
    const double secs = elapsed_s(t0);
    return {rel < 1e-10 && round < 1e-10 && secs < 1.0,
            "rel err " + fmt(rel) + ", round-trip " + fmt(round) + ", " + fmt_fixed(secs, 2) +
                " s (limit 1 s)"};
}

Outcome character_algebra() {
    double worst = 0.0;
    for (const auto& radices :
         {std::vector<int>{2, 3, 2}, std::vector<int>{2, 3, 4}, std::vector<int>{2, 3, 2, 3}}) {
        const SystemSpec spec(radices);
        const std::int64_t n = spec.atom_count();
        for (std::int64_t k = 0; k < n; ++k)
            for (std::int64_t l = 0; l < n; ++l) {
                const std::int64_t s = dot_plus(k, l, spec);
                cplx inner{};
                for (std::int64_t j = 0; j < n; ++j) {
                    const cplx wk = evaluate_character(k, j, spec);
                    const cplx wl = evaluate_character(l, j, spec);
                    worst = std::max(worst, std::abs(wk * wl - evaluate_character(s, j, spec)));
                    inner += wk * std::conj(wl);
                }
                inner /= static_cast<double>(n);
                worst = std::max(worst, std::abs(inner - (k == l ? cplx(1.0, 0.0) : cplx{})));
            }
    }
    return {worst < 1e-12, "exhaustive, max deviation " + fmt(worst)};
}

Outcome block_projection_support() {
    double leak = 0.0;
    for (const auto& radices :
         {std::vector<int>{2, 3, 2}, std::vector<int>{2, 3, 4}, std::vector<int>{2, 3, 2, 3}}) {
        const SystemSpec spec(radices);
        const std::int64_t n = spec.atom_count();
        for (std::int64_t j = 0; j < n; ++j) {
            Signal f;
            f.values.assign(static_cast<std::size_t>(n), cplx{});
            f.values[static_cast<std::size_t>(j)] = 1.0;
            const Spectrum F = fast_forward(f, spec);
            for (int k = 1; k <= spec.levels(); ++k) {
                const std::int64_t run = n / spec.scale(k - 1);
                const std::int64_t lo = j / run * run;
                for (int l = 1; l < spec.radix(k); ++l) {
                    const Signal out = fast_inverse(delta_kl(F, {k, l}, spec), spec);
                    for (std::int64_t i = 0; i < n; ++i)
                        if (i < lo || i >= lo + run)
                            leak = std::max(leak,
                                            std::abs(out.values[static_cast<std::size_t>(i)]));
                }
            }
        }
    }
    return {leak < 1e-12, "exhaustive over atoms and blocks, max leak " + fmt(leak)};
}

Outcome decomposition_exhaustive() {
    const auto t0 = std::chrono::steady_clock::now();
    std::int64_t intervals = 0;
    for (const auto& radices : {std::vector<int>{2, 3, 2}, std::vector<int>{2, 3, 4},
                                std::vector<int>{5, 5}, std::vector<int>{2, 3, 2, 3}}) {
        const SystemSpec spec(radices);
        const std::int64_t n = spec.atom_count();
        for (std::int64_t a = 0; a < n; ++a)
            for (std::int64_t b = a + 1; b <= n; ++b) {
                const IntervalZ seg{a, b};
                const Decomposition dec = decompose_interval(seg, spec);
                if (static_cast<int>(dec.pieces.size()) > 2 * spec.levels() + 2)
                    return {false, "piece bound broke on [" + std::to_string(a) + ", " +
                                       std::to_string(b) + ")"};
                std::vector<char> seen(static_cast<std::size_t>(n), 0);
                std::int64_t total = 0;
                for (const Piece& piece : dec.pieces) {
                    for (std::int64_t x = piece.range.a; x < piece.range.b; ++x) {
                        if (!seg.contains(x) || seen[static_cast<std::size_t>(x)])
                            return {false, "tiling broke on [" + std::to_string(a) + ", " +
                                               std::to_string(b) + ")"};
                        seen[static_cast<std::size_t>(x)] = 1;
                        ++total;
                    }
                    const auto [level, branches] = shifted_blocks(piece, spec);
                    if (level != piece.level || branches != piece.branches)
                        return {false, "shifted form broke on [" + std::to_string(a) + ", " +
                                           std::to_string(b) + ")"};
                }
                if (total != seg.length())
                    return {false, "coverage broke on [" + std::to_string(a) + ", " +
                                       std::to_string(b) + ")"};
                ++intervals;
            }
    }
    const double secs = elapsed_s(t0);
    return {secs < 30.0, std::to_string(intervals) + " intervals across 4 systems, " +
                             fmt_fixed(secs, 2) + " s (limit 30 s)"};
}

Outcome split_identities() {
    Rng rng(0xabc1ULL);
    double worst = 0.0;
    const auto check = [&](const SystemSpec& spec, const IntervalZ& seg) {
        Spectrum F{std::vector<cplx>(static_cast<std::size_t>(spec.atom_count()), cplx{})};
        for (std::int64_t m = seg.a; m < seg.b; ++m)
            F.coeffs[static_cast<std::size_t>(m)] = rng.gaussian();
        worst = std::max(worst, verify_identities(F, seg, spec).max_residual());
    };
    const SystemSpec small({2, 3, 2});
    for (std::int64_t a = 0; a < small.atom_count(); ++a)
        for (std::int64_t b = a + 1; b <= small.atom_count(); ++b) check(small, {a, b});
    const SystemSpec big({2, 3, 2, 3});
    for (int rep = 0; rep < 500; ++rep) {
        const std::int64_t a = rng.below(big.atom_count());
        check(big, {a, a + 1 + rng.below(big.atom_count() - a)});
    }
    return {worst < 1e-10, "all of one system plus 500 random, max residual " + fmt(worst)};
}

Outcome reassembly_energy() {
    Rng rng(0x6e61ULL);
    double worst = 0.0;
    int configs = 0;
    bool rejection_seen = false;
    for (int rep = 0; rep < 100; ++rep) {
        const SystemSpec spec(rep % 2 == 0 ? std::vector<int>{2, 3, 2, 3}
                                           : std::vector<int>{2, 3, 4, 2});
        const std::int64_t n = spec.atom_count();
        std::vector<char> taken(static_cast<std::size_t>(n), 0);
        std::vector<GTerm> terms;
        for (int tries = 0; tries < 12; ++tries) {
            const int level = 1 + static_cast<int>(rng.below(spec.levels()));
            const int branch = 1 + static_cast<int>(rng.below(spec.radix(level) - 1));
            const std::int64_t shift = rng.below(n);
            const IntervalZ blk = block_range({level, branch}, spec);
            bool clear = true;
            for (std::int64_t x = blk.a; clear && x < blk.b; ++x)
                clear = !taken[static_cast<std::size_t>(dot_plus(x, shift, spec))];
            if (!clear) continue;
            for (std::int64_t x = blk.a; x < blk.b; ++x)
                taken[static_cast<std::size_t>(dot_plus(x, shift, spec))] = 1;
            GTerm term;
            term.member.coeffs.resize(static_cast<std::size_t>(n));
            for (auto& c : term.member.coeffs) c = rng.gaussian();
            term.level = level;
            term.branches = {branch};
            term.shift = shift;
            terms.push_back(std::move(term));
        }
        if (terms.empty()) continue;
        ++configs;
        const Spectrum out = apply_G(terms, spec);
        double lhs = 0.0, rhs = 0.0;
        for (const auto& c : out.coeffs) lhs += std::norm(c);
        for (const auto& term : terms)
            for (const int l : term.branches) {
                const Spectrum blk = delta_kl(term.member, {term.level, l}, spec);
                for (const auto& c : blk.coeffs) rhs += std::norm(c);
            }
        worst = std::max(worst, std::abs(lhs - rhs) / rhs);
        try {
            std::vector<GTerm> twice = terms;
            twice.push_back(terms.front());
            apply_G(twice, spec);
        } catch (const std::invalid_argument&) {
            rejection_seen = true;
        }
    }
    return {worst < 1e-12 && rejection_seen && configs >= 100,
            std::to_string(configs) + " configurations, max energy drift " + fmt(worst) +
                ", overlaps rejected"};
}

Outcome ratio_exact_at_two() {
    Rng rng(0x70edULL);
    double worst = 0.0;
    int families = 0;
    for (const auto& radices : {std::vector<int>{2, 3, 2, 3}, std::vector<int>{2, 3, 4, 2}}) {
        const SystemSpec spec(radices);
        for (int rep = 0; rep < 250; ++rep) {
            const auto intervals = gen_interval_family(rng, spec, 1 + rng.below(4));
            const auto fam = gen_polynomial_family(rng, intervals, CoefficientLaw{}, spec);
            worst = std::max(worst, std::abs(rdf_ratio(fam, 2.0, spec) - 1.0));
            ++families;
        }
    }
    return {worst < 1e-10,
            std::to_string(families) + " families, max |ratio - 1| = " + fmt(worst)};
}

Outcome ratio_search_stability() {
    const auto t0 = std::chrono::steady_clock::now();
    TrialConfig cfg;
    cfg.radices = {2, 3, 2, 3};
    cfg.exponents = {1.1, 1.5};
    cfg.trials = 10000;
    cfg.adversarial = true;
    cfg.adversarial_iterations = 100;
    cfg.restarts = 3;
    std::vector<std::vector<double>> maxima(cfg.exponents.size());
    for (const std::uint64_t seed : {101ULL, 202ULL, 303ULL}) {
        cfg.seed = seed;
        const TrialReport report = estimate_constant(cfg);
        for (std::size_t e = 0; e < report.rows.size(); ++e) {
            const double m = report.rows[e].refined_max;
            if (!std::isfinite(m) || m <= 0.0) return {false, "non-finite maximum"};
            maxima[e].push_back(m);
        }
    }
    std::ostringstream note;
    bool stable = true;
    for (std::size_t e = 0; e < maxima.size(); ++e) {
        double mean = 0.0;
        for (const double m : maxima[e]) mean += m;
        mean /= static_cast<double>(maxima[e].size());
        double spread = 0.0;
        for (const double m : maxima[e]) spread = std::max(spread, std::abs(m - mean) / mean);
        stable = stable && spread <= 0.20;
        if (e) note << ", ";
        note << "p=" << cfg.exponents[e] << " max " << fmt_fixed(mean) << " spread "
             << fmt_fixed(100.0 * spread, 1) << "%";
    }
    const double secs = elapsed_s(t0);
    note << ", " << fmt_fixed(secs, 1) << " s (limit 300 s)";
    return {stable && secs < 300.0, note.str()};
}

Outcome low_exponent_block_ratios() {
    TrialConfig cfg;
    cfg.radices = {2, 3, 2, 3};
    cfg.exponents = {0.75, 1.0};
    cfg.trials = 1000;
    cfg.seed = 7;
    cfg.target = RatioTarget::hardy;
    const TrialReport report = estimate_constant(cfg);
    std::ostringstream note;
    bool finite = true;
    for (const auto& row : report.rows) {
        finite = finite && std::isfinite(row.stats.max) && row.stats.max > 0.0;
        note << "p=" << row.exponent << " max " << fmt_fixed(row.stats.max) << ", ";
    }
    TrialConfig sane = cfg;
    sane.exponents = {2.0};
    sane.trials = 200;
    sane.min_intervals = 1;
    sane.max_intervals = 1;
    const TrialReport single = estimate_constant(sane);
    const double cap = single.rows[0].stats.max;
    note << "single-interval p=2 max " << fmt_fixed(cap);
    return {finite && cap <= 1.0 + 1e-10, note.str()};
}

Outcome square_function_checks() {
    TrialConfig cfg;
    cfg.radices = {2, 3, 2, 3};
    cfg.exponents = {2.0};
    cfg.trials = 1000;
    cfg.seed = 13;
    const TrialReport sweep = square_ratio_sweep(cfg);
    const ExponentRow& row = sweep.rows[0];
    const bool unit = std::abs(row.stats.max - 1.0) < 1e-10 &&
                      std::abs(row.stats.min - 1.0) < 1e-10;
    const bool no_violations = row.has_martingale && row.pointwise_violations == 0;

    const SystemSpec walsh({2, 2, 2, 2, 2});
    Rng rng(0x3a15ULL);
    bool bitwise = true;
    for (int rep = 0; rep < 100 && bitwise; ++rep) {
        SpectrumFamily fam;
        fam.members.resize(1);
        fam.members[0].coeffs.resize(static_cast<std::size_t>(walsh.atom_count()));
        for (auto& c : fam.members[0].coeffs) c = rng.gaussian();
        bitwise = square_S(fam, walsh) == square_S_tilde(fam, walsh);
    }
    return {unit && no_violations && bitwise,
            "p=2 ratio in [" + fmt_fixed(row.stats.min, 12) + ", " + fmt_fixed(row.stats.max, 12) +
                "], " + std::to_string(row.pointwise_violations) +
                " pointwise violations, dyadic case bitwise equal"};
}

Outcome deterministic_reports() {
    TrialConfig cfg;
    cfg.radices = {2, 3, 2, 3};
    cfg.exponents = {1.1, 2.0};
    cfg.trials = 300;
    cfg.seed = 17;
    cfg.adversarial = true;
    cfg.adversarial_iterations = 50;
    cfg.restarts = 2;
    nlohmann::json a = report_to_json(estimate_constant(cfg));
    nlohmann::json b = report_to_json(estimate_constant(cfg));
    a.erase("runtime_ms");
    b.erase("runtime_ms");
    const bool same = a.dump() == b.dump();
    return {same, same ? "identical output modulo runtime" : "reports diverged"};
}

}  // namespace

int main() {
    struct Entry {
        const char* name;
        Outcome (*fn)();
    };
    const Entry entries[] = {
        {"fast transform matches the quadratic reference", transform_against_reference},
        {"character product law and orthonormality", character_algebra},
        {"block projections stay on the carrying atom", block_projection_support},
        {"interval decomposition tiles and shifts everywhere", decomposition_exhaustive},
        {"interval split identities hold", split_identities},
        {"block reassembly preserves energy", reassembly_energy},
        {"interval ratio is exactly one at p = 2", ratio_exact_at_two},
        {"ratio search is finite and seed-stable below p = 2", ratio_search_stability},
        {"low-exponent block ratios stay finite", low_exponent_block_ratios},
        {"square functions behave at p = 2", square_function_checks},
        {"trial reports are deterministic", deterministic_reports},
    };
    int failures = 0;
    int index = 0;
    for (const Entry& entry : entries) {
        ++index;
        Outcome outcome;
        try {
            outcome = entry.fn();
        } catch (const std::exception& e) {
            outcome = {false, std::string("threw: ") + e.what()};
        }
        failures += outcome.ok ? 0 : 1;
        std::cout << (outcome.ok ? "[PASS] " : "[FAIL] ") << (index < 10 ? "0" : "") << index
                  << " " << entry.name << "  (" << outcome.detail << ")\n";
    }
    std::cout << "11 criteria, " << failures << " failed\n";
    return failures;
}

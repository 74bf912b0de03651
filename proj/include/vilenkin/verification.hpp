#pragma once

#include "vilenkin/decomposition.hpp"
#include "vilenkin/harness.hpp"
#include "vilenkin/operators.hpp"
#include "vilenkin/system.hpp"
#include "vilenkin/transform.hpp"

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

// Named invariant suites over a whole system, shared by the CLI and the
// integration tests.  Exhaustive sweeps run whenever the system is small
// enough; larger systems fall back to seeded sampling scaled by `depth`.
// The forward-transform entry point is injectable so callers can prove the
// suites catch a corrupted transform.

namespace vilenkin {

using ForwardFn = std::function<Spectrum(const Signal&, const SystemSpec&)>;

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace detail {

inline Signal random_signal(Rng& rng, const SystemSpec& spec) {
    Signal f;
    f.values.resize(static_cast<std::size_t>(spec.atom_count()));
    for (auto& v : f.values) v = rng.gaussian();
    return f;
}

inline std::string scientific(double v) {
    std::ostringstream out;
    out.precision(2);
    out << std::scientific << v;
    return out.str();
}

}  // namespace detail

inline SuiteResult check_group_law(const SystemSpec& spec, std::uint64_t seed, int depth) {
    SuiteResult result{"group-law", true, ""};
    const std::int64_t n = spec.padded_count();
    for (std::int64_t k = 0; k < n; ++k)
        if (from_digits(to_digits(k, spec), spec) != k) {
            return {"group-law", false, "digit round-trip broke at " + std::to_string(k)};
        }

    Rng rng(seed);
    const bool exhaustive = spec.atom_count() <= 256;
    const std::int64_t pairs = exhaustive ? 0 : 500LL * depth;
    const auto pair_check = [&](std::int64_t k, std::int64_t l) {
        const std::int64_t s = dot_plus(k, l, spec);
        return s >= 0 && s < n && s == dot_plus(l, k, spec) && dot_minus(s, l, spec) == k &&
               dot_plus(k, dot_neg(k, spec), spec) == 0;
    };
    bool ok = true;
    if (exhaustive) {
        for (std::int64_t k = 0; ok && k < n; ++k)
            for (std::int64_t l = 0; ok && l < n; ++l) ok = pair_check(k, l);
    } else {
        for (std::int64_t i = 0; ok && i < pairs; ++i) ok = pair_check(rng.below(n), rng.below(n));
    }
    if (!ok) return {"group-law", false, "digitwise addition failed a pair check"};

    for (std::int64_t i = 0; i < 200LL * depth; ++i) {
        const std::int64_t k = rng.below(n), l = rng.below(n), r = rng.below(n);
        if (dot_plus(dot_plus(k, l, spec), r, spec) != dot_plus(k, dot_plus(l, r, spec), spec))
            return {"group-law", false, "associativity failed"};
    }

    for (int k = 1; k <= spec.levels(); ++k) {
        const std::int64_t width = spec.scale(k - 1);
        for (int l = 1; l < spec.radix(k); ++l)
            for (std::int64_t x = l * width; x < (l + 1) * width; ++x) {
                const std::int64_t y = dot_minus(x, l * width, spec);
                if (y < 0 || y >= width)
                    return {"group-law", false, "block shift identity failed at level " +
                                                    std::to_string(k)};
            }
    }
    result.detail = exhaustive ? "exhaustive over [0, 2*m_K)" : "sampled";
    return result;
}

inline SuiteResult check_orthonormality(const SystemSpec& spec, std::uint64_t seed, int depth) {
    const std::int64_t n = spec.atom_count();
    Rng rng(seed);
    const bool exhaustive = n <= 144;
    double worst = 0.0;
    const auto inner_error = [&](std::int64_t k, std::int64_t l) {
        cplx acc{};
        for (std::int64_t j = 0; j < n; ++j)
            acc += evaluate_character(k, j, spec) * std::conj(evaluate_character(l, j, spec));
        acc /= static_cast<double>(n);
        return std::abs(acc - (k == l ? cplx(1.0, 0.0) : cplx{}));
    };
    if (exhaustive) {
        for (std::int64_t k = 0; k < n; ++k)
            for (std::int64_t l = 0; l < n; ++l) worst = std::max(worst, inner_error(k, l));
    } else {
        for (int i = 0; i < 50 * depth; ++i)
            worst = std::max(worst, inner_error(rng.below(n), rng.below(n)));
    }
    return {"orthonormality", worst < 1e-12,
            (exhaustive ? "exhaustive, " : "sampled, ") + std::string("max deviation ") +
                detail::scientific(worst)};
}

inline SuiteResult check_transform_oracle(const SystemSpec& spec, std::uint64_t seed, int depth,
                                          const ForwardFn& forward) {
    Rng rng(seed);
    double worst = 0.0;
    for (int rep = 0; rep < depth; ++rep) {
        const Signal f = detail::random_signal(rng, spec);
        const Spectrum fast = forward(f, spec);
        const Spectrum slow = naive_forward(f, spec);
        for (std::size_t i = 0; i < fast.coeffs.size(); ++i)
            worst = std::max(worst, std::abs(fast.coeffs[i] - slow.coeffs[i]));
        const Signal back = fast_inverse(fast, spec);
        for (std::size_t i = 0; i < back.values.size(); ++i)
            worst = std::max(worst, std::abs(back.values[i] - f.values[i]));
        double atoms = 0.0, coeffs = 0.0;
        for (const auto& v : f.values) atoms += std::norm(v);
        atoms /= static_cast<double>(spec.atom_count());
        for (const auto& c : fast.coeffs) coeffs += std::norm(c);
        worst = std::max(worst, std::abs(atoms - coeffs));
    }
    return {"transform-oracle", worst < 1e-10,
            "max deviation " + detail::scientific(worst) + " over " + std::to_string(depth) +
                " signals"};
}

inline SuiteResult check_modulation(const SystemSpec& spec, std::uint64_t seed, int depth) {
    const std::int64_t n = spec.atom_count();
    Rng rng(seed);
    double worst = 0.0;
    const bool exhaustive = n <= 36;
    const auto product_error = [&](std::int64_t k, std::int64_t l) {
        const std::int64_t s = dot_plus(k, l, spec);
        double m = 0.0;
        for (std::int64_t j = 0; j < n; ++j)
            m = std::max(m, std::abs(evaluate_character(k, j, spec) *
                                         evaluate_character(l, j, spec) -
                                     evaluate_character(s, j, spec)));
        return m;
    };
    if (exhaustive) {
        for (std::int64_t k = 0; k < n; ++k)
            for (std::int64_t l = 0; l < n; ++l) worst = std::max(worst, product_error(k, l));
    } else {
        for (int i = 0; i < 20 * depth; ++i)
            worst = std::max(worst, product_error(rng.below(n), rng.below(n)));
    }

    const Signal f = detail::random_signal(rng, spec);
    const Spectrum F = fast_forward(f, spec);
    for (std::int64_t shift = 0; shift < std::min<std::int64_t>(n, 4 * depth); ++shift)
        for (const Modulation dir : {Modulation::forward, Modulation::inverse}) {
            const Spectrum via_atoms = fast_forward(modulate(f, shift, dir, spec), spec);
            const Spectrum via_index = modulate_spectrum(F, shift, dir, spec);
            for (std::size_t i = 0; i < via_atoms.coeffs.size(); ++i)
                worst = std::max(worst, std::abs(via_atoms.coeffs[i] - via_index.coeffs[i]));
        }
    return {"modulation", worst < 1e-10, "max deviation " + detail::scientific(worst)};
}

// Indicators of fine atoms span every atom-supported function, so checking
// them checks all of them: block projections must not leak outside the
// coarse atom carrying the input.
inline SuiteResult check_block_support(const SystemSpec& spec, std::uint64_t seed, int depth) {
    const std::int64_t n = spec.atom_count();
    Rng rng(seed);
    double leak = 0.0;
    const bool exhaustive = n <= 144;
    const std::int64_t atoms = exhaustive ? n : std::min<std::int64_t>(n, 4 * depth);
    for (std::int64_t pick = 0; pick < atoms; ++pick) {
        const std::int64_t j = exhaustive ? pick : rng.below(n);
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
                        leak = std::max(leak, std::abs(out.values[static_cast<std::size_t>(i)]));
            }
        }
    }
    return {"block-support", leak < 1e-12,
            (exhaustive ? "exhaustive, " : "sampled, ") + std::string("max leak ") +
                detail::scientific(leak)};
}

inline SuiteResult check_partition_of_identity(const SystemSpec& spec, std::uint64_t seed,
                                               int depth) {
    const std::int64_t n = spec.atom_count();
    std::vector<int> covered(static_cast<std::size_t>(n), 0);
    covered[0] += 1;  // delta_0
    for (int k = 1; k <= spec.levels(); ++k)
        for (int l = 1; l < spec.radix(k); ++l) {
            const IntervalZ blk = block_range({k, l}, spec);
            for (std::int64_t x = blk.a; x < blk.b; ++x) covered[static_cast<std::size_t>(x)] += 1;
        }
    for (std::int64_t x = 0; x < n; ++x)
        if (covered[static_cast<std::size_t>(x)] != 1)
            return {"partition-of-identity", false,
                    "index " + std::to_string(x) + " covered " +
                        std::to_string(covered[static_cast<std::size_t>(x)]) + " times"};

    Rng rng(seed);
    for (int rep = 0; rep < depth; ++rep) {
        const Signal f = detail::random_signal(rng, spec);
        const Spectrum F = fast_forward(f, spec);
        Spectrum sum{std::vector<cplx>(F.coeffs.size(), cplx{})};
        for (std::size_t i = 0; i < sum.coeffs.size(); ++i)
            sum.coeffs[i] = delta_k(F, 0, spec).coeffs[i];
        for (int k = 1; k <= spec.levels(); ++k)
            for (int l = 1; l < spec.radix(k); ++l) {
                const Spectrum blk = delta_kl(F, {k, l}, spec);
                for (std::size_t i = 0; i < sum.coeffs.size(); ++i) sum.coeffs[i] += blk.coeffs[i];
            }
        for (std::size_t i = 0; i < sum.coeffs.size(); ++i)
            if (sum.coeffs[i] != F.coeffs[i])
                return {"partition-of-identity", false, "block sum drifted from the identity"};
    }
    return {"partition-of-identity", true, "exact"};
}

inline SuiteResult check_decomposition_cover(const SystemSpec& spec, std::uint64_t seed,
                                             int depth) {
    const std::int64_t n = spec.atom_count();
    Rng rng(seed);
    const bool exhaustive = n <= 100;
    std::int64_t checked = 0;
    const auto check_one = [&](const IntervalZ& seg) -> bool {
        const Decomposition dec = decompose_interval(seg, spec);
        if (static_cast<int>(dec.pieces.size()) > 2 * spec.levels() + 2) return false;
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        std::int64_t total = 0;
        for (const Piece& piece : dec.pieces) {
            if (piece.is_empty() != (piece.branches.empty() && piece.kind != PieceKind::anchor))
                return false;
            for (std::int64_t x = piece.range.a; x < piece.range.b; ++x) {
                if (!seg.contains(x) || seen[static_cast<std::size_t>(x)]) return false;
                seen[static_cast<std::size_t>(x)] = 1;
                ++total;
            }
            const auto [level, branches] = shifted_blocks(piece, spec);  // throws on mismatch
            if (level != piece.level || branches != piece.branches) return false;
        }
        ++checked;
        return total == seg.length();
    };
    if (exhaustive) {
        for (std::int64_t a = 0; a < n; ++a)
            for (std::int64_t b = a + 1; b <= n; ++b)
                if (!check_one({a, b}))
                    return {"decomposition-cover", false,
                            "failed on [" + std::to_string(a) + ", " + std::to_string(b) + ")"};
    } else {
        for (int rep = 0; rep < 25 * depth; ++rep) {
            const std::int64_t a = rng.below(n);
            const std::int64_t b = a + 1 + rng.below(n - a);
            if (!check_one({a, b}))
                return {"decomposition-cover", false,
                        "failed on [" + std::to_string(a) + ", " + std::to_string(b) + ")"};
        }
    }
    return {"decomposition-cover", true,
            (exhaustive ? "exhaustive, " : "sampled, ") + std::to_string(checked) + " intervals"};
}

inline SuiteResult check_interval_identities(const SystemSpec& spec, std::uint64_t seed,
                                             int depth) {
    const std::int64_t n = spec.atom_count();
    Rng rng(seed);
    const bool exhaustive = n <= 30;
    double worst = 0.0;
    const auto check_one = [&](const IntervalZ& seg) {
        Spectrum F{std::vector<cplx>(static_cast<std::size_t>(n), cplx{})};
        for (std::int64_t m = seg.a; m < seg.b; ++m)
            F.coeffs[static_cast<std::size_t>(m)] = rng.gaussian();
        worst = std::max(worst, verify_identities(F, seg, spec).max_residual());
    };
    if (exhaustive) {
        for (std::int64_t a = 0; a < n; ++a)
            for (std::int64_t b = a + 1; b <= n; ++b) check_one({a, b});
    } else {
        for (int rep = 0; rep < 20 * depth; ++rep) {
            const std::int64_t a = rng.below(n);
            check_one({a, a + 1 + rng.below(n - a)});
        }
    }
    return {"interval-identities", worst < 1e-10,
            "max residual " + detail::scientific(worst)};
}

inline SuiteResult check_g_energy(const SystemSpec& spec, std::uint64_t seed, int depth) {
    const std::int64_t n = spec.atom_count();
    Rng rng(seed);
    double worst = 0.0;
    for (int rep = 0; rep < depth; ++rep) {
        // Draw term after term, keeping only those whose shifted blocks stay
        // clear of everything accepted so far.
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
        const Spectrum out = apply_G(terms, spec);
        double lhs = 0.0, rhs = 0.0, total = 0.0;
        for (const auto& c : out.coeffs) lhs += std::norm(c);
        for (const auto& term : terms) {
            for (const int l : term.branches) {
                const Spectrum blk = delta_kl(term.member, {term.level, l}, spec);
                for (const auto& c : blk.coeffs) rhs += std::norm(c);
            }
            for (const auto& c : term.member.coeffs) total += std::norm(c);
        }
        worst = std::max(worst, std::abs(lhs - rhs) / (rhs > 0.0 ? rhs : 1.0));
        if (lhs > total + 1e-9) return {"g-energy", false, "output energy exceeded the input"};

        bool rejected = false;
        try {
            std::vector<GTerm> twice = terms;
            twice.push_back(terms.front());
            apply_G(twice, spec);
        } catch (const std::invalid_argument&) {
            rejected = true;
        }
        if (!rejected) return {"g-energy", false, "overlapping terms were not rejected"};
    }
    return {"g-energy", worst < 1e-12, "max energy drift " + detail::scientific(worst)};
}

inline std::vector<SuiteResult> run_verification(const SystemSpec& spec, std::uint64_t seed,
                                                 int depth, const ForwardFn& forward = {}) {
    const ForwardFn fwd = forward ? forward : [](const Signal& f, const SystemSpec& s) {
        return fast_forward(f, s);
    };
    std::vector<SuiteResult> results;
    results.push_back(check_group_law(spec, splitmix(seed ^ 1), depth));
    results.push_back(check_orthonormality(spec, splitmix(seed ^ 2), depth));
    results.push_back(check_transform_oracle(spec, splitmix(seed ^ 3), depth, fwd));
    results.push_back(check_modulation(spec, splitmix(seed ^ 4), depth));
    results.push_back(check_block_support(spec, splitmix(seed ^ 5), depth));
    results.push_back(check_partition_of_identity(spec, splitmix(seed ^ 6), depth));
    results.push_back(check_decomposition_cover(spec, splitmix(seed ^ 7), depth));
    results.push_back(check_interval_identities(spec, splitmix(seed ^ 8), depth));
    results.push_back(check_g_energy(spec, splitmix(seed ^ 9), depth));
    return results;
}

}  // namespace vilenkin

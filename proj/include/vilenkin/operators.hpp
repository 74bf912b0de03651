#pragma once

#include "vilenkin/system.hpp"
#include "vilenkin/transform.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

// Coefficient-side projections and the square functions built from them.
//
// All operators act on Spectrum by masking index sets:
//   cond_expectation keeps [0, m_k), the conditional expectation E_k;
//   delta_k keeps the band [m_{k-1}, m_k), the martingale difference;
//   delta_kl keeps one block [l*m_{k-1}, (l+1)*m_{k-1}) of that band.
// The blocks of a band partition it, and delta_0 together with all blocks
// partitions [0, m_K), so these masks compose exactly.
//
// Norms use the probability measure: ||f||_p = ((1/m_K) sum_j |f(j)|^p)^{1/p}.
// For p < 1 this is the usual quasinorm and is handled by the same formula.

namespace vilenkin {

struct SpectrumFamily {
    std::vector<Spectrum> members;
};

// Block l of the level-k band.
struct BlockIndex {
    int level = 1;   // k in [1, K]
    int branch = 1;  // l in [1, p_k - 1]
};

inline IntervalZ block_range(const BlockIndex& blk, const SystemSpec& spec) {
    if (blk.level < 1 || blk.level > spec.levels())
        throw std::out_of_range("block_range: level " + std::to_string(blk.level) +
                                " outside [1, K]");
    if (blk.branch < 1 || blk.branch >= spec.radix(blk.level))
        throw std::out_of_range("block_range: branch " + std::to_string(blk.branch) +
                                " outside [1, p_k - 1]");
    const std::int64_t width = spec.scale(blk.level - 1);
    return IntervalZ{blk.branch * width, (blk.branch + 1) * width};
}

// Coefficient mask onto [a, b).
inline Spectrum project(const Spectrum& F, const IntervalZ& seg, const SystemSpec& spec) {
    detail::check_spectrum(F, spec, "project");
    validate_interval(seg, spec);
    Spectrum out;
    out.coeffs.assign(F.coeffs.size(), cplx{});
    for (std::int64_t n = seg.a; n < seg.b; ++n)
        out.coeffs[static_cast<std::size_t>(n)] = F.coeffs[static_cast<std::size_t>(n)];
    return out;
}

// E_k: truncation to indices below m_k.  On atom values this is averaging
// over the level-k atoms, which is what the tests check it against.
inline Spectrum cond_expectation(const Spectrum& F, int level, const SystemSpec& spec) {
    detail::check_spectrum(F, spec, "cond_expectation");
    if (level < 0 || level > spec.levels())
        throw std::out_of_range("cond_expectation: level outside [0, K]");
    Spectrum out;
    out.coeffs.assign(F.coeffs.size(), cplx{});
    for (std::int64_t n = 0; n < spec.scale(level); ++n)
        out.coeffs[static_cast<std::size_t>(n)] = F.coeffs[static_cast<std::size_t>(n)];
    return out;
}

// Martingale difference: the band [m_{k-1}, m_k) for k >= 1, the single
// index 0 for k = 0.
inline Spectrum delta_k(const Spectrum& F, int level, const SystemSpec& spec) {
    detail::check_spectrum(F, spec, "delta_k");
    if (level < 0 || level > spec.levels())
        throw std::out_of_range("delta_k: level outside [0, K]");
    Spectrum out;
    out.coeffs.assign(F.coeffs.size(), cplx{});
    const std::int64_t lo = level == 0 ? 0 : spec.scale(level - 1);
    const std::int64_t hi = level == 0 ? 1 : spec.scale(level);
    for (std::int64_t n = lo; n < hi; ++n)
        out.coeffs[static_cast<std::size_t>(n)] = F.coeffs[static_cast<std::size_t>(n)];
    return out;
}

inline Spectrum delta_kl(const Spectrum& F, const BlockIndex& blk, const SystemSpec& spec) {
    detail::check_spectrum(F, spec, "delta_kl");
    return project(F, block_range(blk, spec), spec);
}

using RealSignal = std::vector<double>;

// Martingale square function of a family: sqrt of the summed squared
// differences, pointwise over atoms.
inline RealSignal square_S(const SpectrumFamily& fam, const SystemSpec& spec) {
    RealSignal acc(static_cast<std::size_t>(spec.atom_count()), 0.0);
    for (const auto& member : fam.members) {
        detail::check_spectrum(member, spec, "square_S");
        for (int k = 0; k <= spec.levels(); ++k) {
            const Signal part = fast_inverse(delta_k(member, k, spec), spec);
            for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += std::norm(part.values[j]);
        }
    }
    for (auto& v : acc) v = std::sqrt(v);
    return acc;
}

// Refined square function: every band split into its blocks.  Pointwise
// square_S <= sqrt(max_radix - 1) * square_S_tilde; for radix 2 throughout
// the two functions coincide because each band is a single block.
inline RealSignal square_S_tilde(const SpectrumFamily& fam, const SystemSpec& spec) {
    RealSignal acc(static_cast<std::size_t>(spec.atom_count()), 0.0);
    for (const auto& member : fam.members) {
        detail::check_spectrum(member, spec, "square_S_tilde");
        {
            const Signal part = fast_inverse(delta_k(member, 0, spec), spec);
            for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += std::norm(part.values[j]);
        }
        for (int k = 1; k <= spec.levels(); ++k)
            for (int l = 1; l < spec.radix(k); ++l) {
                const Signal part = fast_inverse(delta_kl(member, {k, l}, spec), spec);
                for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += std::norm(part.values[j]);
            }
    }
    for (auto& v : acc) v = std::sqrt(v);
    return acc;
}

namespace detail {
inline double check_exponent(double p, const char* who) {
    if (!(p > 0.0))
        throw std::invalid_argument(std::string(who) + ": exponent must be positive");
    return p;
}
}  // namespace detail

inline double lp_norm(const RealSignal& f, double p) {
    detail::check_exponent(p, "lp_norm");
    if (f.empty()) throw std::invalid_argument("lp_norm: empty signal");
    double acc = 0.0;
    for (const double v : f) acc += std::pow(std::abs(v), p);
    return std::pow(acc / static_cast<double>(f.size()), 1.0 / p);
}

inline double lp_norm(const Signal& f, double p) {
    detail::check_exponent(p, "lp_norm");
    if (f.values.empty()) throw std::invalid_argument("lp_norm: empty signal");
    double acc = 0.0;
    for (const auto& v : f.values) acc += std::pow(std::abs(v), p);
    return std::pow(acc / static_cast<double>(f.values.size()), 1.0 / p);
}

// L^p norm of the pointwise l2 magnitude of a family.
inline double lp_l2_norm(const SpectrumFamily& fam, double p, const SystemSpec& spec) {
    detail::check_exponent(p, "lp_l2_norm");
    RealSignal mag(static_cast<std::size_t>(spec.atom_count()), 0.0);
    for (const auto& member : fam.members) {
        detail::check_spectrum(member, spec, "lp_l2_norm");
        const Signal f = fast_inverse(member, spec);
        for (std::size_t j = 0; j < mag.size(); ++j) mag[j] += std::norm(f.values[j]);
    }
    for (auto& v : mag) v = std::sqrt(v);
    return lp_norm(mag, p);
}

// Hardy-space norm at exponent p: the L^p norm of the refined square
// function.  At p = 2 it agrees with lp_l2_norm by orthogonality of the
// blocks.
inline double hardy_norm(const SpectrumFamily& fam, double p, const SystemSpec& spec) {
    detail::check_exponent(p, "hardy_norm");
    return lp_norm(square_S_tilde(fam, spec), p);
}

}  // namespace vilenkin

#pragma once

#include "vilenkin/system.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Vilenkin characters and the fast transform between atom values and
// character coefficients.
//
// Atom j of the finest partition carries big-endian digits a_1..a_K with
// j = sum_i a_i * (m_K / m_i).  The character of index n with little-endian
// digits alpha_1..alpha_K takes the value
//
//     w_n(j) = exp(2 pi i * sum_i alpha_i a_i / p_i)
//
// on that atom.  Analysis uses the probability measure, so the forward
// transform divides by m_K and every w_n has unit L2 norm; synthesis has no
// normalization.  The fast path factors the transform into one stage per
// level and costs O(m_K * sum_i p_i) against O(m_K^2) for the direct sums.

namespace vilenkin {

using cplx = std::complex<double>;

struct Signal {
    std::vector<cplx> values;  // one entry per atom
};

struct Spectrum {
    std::vector<cplx> coeffs;  // one entry per character index
};

// Big-endian digit vector a_1..a_K of an atom index.
struct AtomDigits {
    std::vector<int> a;
};

inline AtomDigits atom_digits(std::int64_t j, const SystemSpec& spec) {
    if (j < 0 || j >= spec.atom_count())
        throw std::out_of_range("atom_digits: atom " + std::to_string(j) + " outside [0, m_K)");
    AtomDigits out;
    out.a.resize(static_cast<std::size_t>(spec.levels()));
    for (int i = spec.levels(); i >= 1; --i) {
        const int p = spec.radix(i);
        out.a[static_cast<std::size_t>(i) - 1] = static_cast<int>(j % p);
        j /= p;
    }
    return out;
}

inline std::int64_t atom_index(const AtomDigits& digits, const SystemSpec& spec) {
    if (digits.a.size() != static_cast<std::size_t>(spec.levels()))
        throw std::invalid_argument("atom_index: digit count does not match the system depth");
    std::int64_t j = 0;
    for (int i = 1; i <= spec.levels(); ++i) {
        const int a = digits.a[static_cast<std::size_t>(i) - 1];
        if (a < 0 || a >= spec.radix(i))
            throw std::out_of_range("atom_index: digit a_" + std::to_string(i) + " out of range");
        j = j * spec.radix(i) + a;
    }
    return j;
}

// w_n evaluated on atom j.
inline cplx evaluate_character(std::int64_t n, std::int64_t j, const SystemSpec& spec) {
    if (n < 0 || n >= spec.atom_count())
        throw std::out_of_range("evaluate_character: index " + std::to_string(n) +
                                " outside [0, m_K)");
    const AtomDigits atom = atom_digits(j, spec);
    double turns = 0.0;  // phase in units of a full turn; at most K summands
    for (int i = 1; i <= spec.levels(); ++i) {
        const int p = spec.radix(i);
        const int alpha = static_cast<int>(n % p);
        n /= p;
        turns += static_cast<double>((alpha * atom.a[static_cast<std::size_t>(i) - 1]) % p) / p;
    }
    return std::polar(1.0, 2.0 * std::numbers::pi * turns);
}

namespace detail {
inline void check_signal(const Signal& f, const SystemSpec& spec, const char* who) {
    if (std::ssize(f.values) != spec.atom_count())
        throw std::invalid_argument(std::string(who) + ": signal length " +
                                    std::to_string(f.values.size()) + " != m_K");
}
inline void check_spectrum(const Spectrum& F, const SystemSpec& spec, const char* who) {
    if (std::ssize(F.coeffs) != spec.atom_count())
        throw std::invalid_argument(std::string(who) + ": spectrum length " +
                                    std::to_string(F.coeffs.size()) + " != m_K");
}
}  // namespace detail

// Direct O(m_K^2) analysis sum; the oracle the fast path is tested against.
inline Spectrum naive_forward(const Signal& f, const SystemSpec& spec) {
    detail::check_signal(f, spec, "naive_forward");
    const std::int64_t n_atoms = spec.atom_count();
    Spectrum out;
    out.coeffs.assign(static_cast<std::size_t>(n_atoms), cplx{});
    for (std::int64_t n = 0; n < n_atoms; ++n) {
        cplx acc{};
        for (std::int64_t j = 0; j < n_atoms; ++j)
            acc += f.values[static_cast<std::size_t>(j)] * std::conj(evaluate_character(n, j, spec));
        out.coeffs[static_cast<std::size_t>(n)] = acc / static_cast<double>(n_atoms);
    }
    return out;
}

// Direct synthesis sum_n F(n) w_n; no normalization.
inline Signal naive_inverse(const Spectrum& F, const SystemSpec& spec) {
    detail::check_spectrum(F, spec, "naive_inverse");
    const std::int64_t n_atoms = spec.atom_count();
    Signal out;
    out.values.assign(static_cast<std::size_t>(n_atoms), cplx{});
    for (std::int64_t j = 0; j < n_atoms; ++j) {
        cplx acc{};
        for (std::int64_t n = 0; n < n_atoms; ++n)
            acc += F.coeffs[static_cast<std::size_t>(n)] * evaluate_character(n, j, spec);
        out.values[static_cast<std::size_t>(j)] = acc;
    }
    return out;
}

namespace detail {
inline std::vector<cplx> stage_kernel(int p, double sign) {
    std::vector<cplx> w(static_cast<std::size_t>(p));
    for (int r = 0; r < p; ++r)
        w[static_cast<std::size_t>(r)] = std::polar(1.0, sign * 2.0 * std::numbers::pi * r / p);
    return w;
}
}  // namespace detail

// Fast analysis.  Stage i (run from the finest level K down to 1) combines,
// inside every contiguous block of length m_K/m_{i-1}, the p_i sub-blocks of
// already-transformed tails:
//
//     dst[alpha + p_i*t] = sum_a exp(-2 pi i alpha a / p_i) * src[a*sub + t]
//
// which leaves coefficients in natural index order at the end.
inline Spectrum fast_forward(const Signal& f, const SystemSpec& spec) {
    detail::check_signal(f, spec, "fast_forward");
    const std::int64_t n_atoms = spec.atom_count();
    std::vector<cplx> cur = f.values;
    std::vector<cplx> nxt(cur.size());
    for (int i = spec.levels(); i >= 1; --i) {
        const int p = spec.radix(i);
        const std::int64_t sub = n_atoms / spec.scale(i);
        const std::int64_t blk = sub * p;
        const auto w = detail::stage_kernel(p, -1.0);
        for (std::int64_t base = 0; base < n_atoms; base += blk) {
            if (p == 2) {
                for (std::int64_t t = 0; t < sub; ++t) {
                    const cplx x0 = cur[static_cast<std::size_t>(base + t)];
                    const cplx x1 = cur[static_cast<std::size_t>(base + sub + t)];
                    nxt[static_cast<std::size_t>(base + 2 * t)] = x0 + x1;
                    nxt[static_cast<std::size_t>(base + 2 * t + 1)] = x0 - x1;
                }
            } else {
                for (std::int64_t t = 0; t < sub; ++t)
                    for (int alpha = 0; alpha < p; ++alpha) {
                        cplx acc{};
                        for (int a = 0; a < p; ++a)
                            acc += w[static_cast<std::size_t>((alpha * a) % p)] *
                                   cur[static_cast<std::size_t>(base + a * sub + t)];
                        nxt[static_cast<std::size_t>(base + alpha + p * t)] = acc;
                    }
            }
        }
        cur.swap(nxt);
    }
    const double inv = 1.0 / static_cast<double>(n_atoms);
    for (auto& c : cur) c *= inv;
    return Spectrum{std::move(cur)};
}

// Fast synthesis: the analysis stages inverted in the opposite order with
// conjugate kernels and the transposed index map; no normalization.
inline Signal fast_inverse(const Spectrum& F, const SystemSpec& spec) {
    detail::check_spectrum(F, spec, "fast_inverse");
    const std::int64_t n_atoms = spec.atom_count();
    std::vector<cplx> cur = F.coeffs;
    std::vector<cplx> nxt(cur.size());
    for (int i = 1; i <= spec.levels(); ++i) {
        const int p = spec.radix(i);
        const std::int64_t sub = n_atoms / spec.scale(i);
        const std::int64_t blk = sub * p;
        const auto w = detail::stage_kernel(p, 1.0);
        for (std::int64_t base = 0; base < n_atoms; base += blk) {
            if (p == 2) {
                for (std::int64_t t = 0; t < sub; ++t) {
                    const cplx x0 = cur[static_cast<std::size_t>(base + 2 * t)];
                    const cplx x1 = cur[static_cast<std::size_t>(base + 2 * t + 1)];
                    nxt[static_cast<std::size_t>(base + t)] = x0 + x1;
                    nxt[static_cast<std::size_t>(base + sub + t)] = x0 - x1;
                }
            } else {
                for (std::int64_t t = 0; t < sub; ++t)
                    for (int a = 0; a < p; ++a) {
                        cplx acc{};
                        for (int alpha = 0; alpha < p; ++alpha)
                            acc += w[static_cast<std::size_t>((alpha * a) % p)] *
                                   cur[static_cast<std::size_t>(base + alpha + p * t)];
                        nxt[static_cast<std::size_t>(base + a * sub + t)] = acc;
                    }
            }
        }
        cur.swap(nxt);
    }
    return Signal{std::move(cur)};
}

enum class Modulation { forward, inverse };

// Pointwise multiply by w_n (forward) or by its conjugate (inverse).
inline Signal modulate(const Signal& f, std::int64_t n, Modulation dir, const SystemSpec& spec) {
    detail::check_signal(f, spec, "modulate");
    Signal out = f;
    for (std::int64_t j = 0; j < spec.atom_count(); ++j) {
        const cplx w = evaluate_character(n, j, spec);
        out.values[static_cast<std::size_t>(j)] *= (dir == Modulation::forward ? w : std::conj(w));
    }
    return out;
}

// The same modulation acting on coefficients: multiplying by w_n shifts the
// index by the group law, (w_n f)^(m) = f^(m (-) n).
inline Spectrum modulate_spectrum(const Spectrum& F, std::int64_t n, Modulation dir,
                                  const SystemSpec& spec) {
    detail::check_spectrum(F, spec, "modulate_spectrum");
    if (n < 0 || n >= spec.atom_count())
        throw std::out_of_range("modulate_spectrum: index outside [0, m_K)");
    Spectrum out;
    out.coeffs.resize(F.coeffs.size());
    for (std::int64_t m = 0; m < spec.atom_count(); ++m) {
        const std::int64_t src =
            dir == Modulation::forward ? dot_minus(m, n, spec) : dot_plus(m, n, spec);
        out.coeffs[static_cast<std::size_t>(m)] = F.coeffs[static_cast<std::size_t>(src)];
    }
    return out;
}

}  // namespace vilenkin

#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Mixed-radix index arithmetic for a bounded radix sequence p_1..p_K.
//
// Every n in [0, m_K) factors as n = sum_i alpha_i * m_{i-1} with digits
// 0 <= alpha_i < p_i and scales m_0 = 1, m_l = p_1*...*p_l.  Digitwise modular
// addition turns [0, m_K) into an abelian group; the characters of that group
// are the Vilenkin functions evaluated in transform.hpp.
//
// One extra position with radix 2 is kept past level K so that the value m_K
// itself (which occurs as an interval endpoint) has a digit representation.
// Digit arithmetic therefore accepts the padded range [0, 2*m_K).

namespace vilenkin {

class SystemSpec {
public:
    // Boundedness cap: sup p_i <= 64.  Keeps the per-level block fan-out small.
    static constexpr int radix_cap = 64;

    explicit SystemSpec(std::vector<int> radices) : radices_(std::move(radices)) {
        if (radices_.empty())
            throw std::invalid_argument("SystemSpec: need at least one radix");
        scales_.resize(radices_.size() + 1);
        scales_[0] = 1;
        for (std::size_t i = 0; i < radices_.size(); ++i) {
            const int p = radices_[i];
            if (p < 2)
                throw std::invalid_argument("SystemSpec: radix p_" + std::to_string(i + 1) +
                                            " = " + std::to_string(p) + " is less than 2");
            if (p > radix_cap)
                throw std::invalid_argument("SystemSpec: radix p_" + std::to_string(i + 1) +
                                            " = " + std::to_string(p) + " exceeds the cap " +
                                            std::to_string(radix_cap));
            // 2*m_K must stay representable for the padded position.
            if (scales_[i] > std::numeric_limits<std::int64_t>::max() / 2 / p)
                throw std::overflow_error("SystemSpec: m_K overflows 64-bit range");
            scales_[i + 1] = scales_[i] * p;
            if (p > max_radix_) max_radix_ = p;
        }
    }

    int levels() const noexcept { return static_cast<int>(radices_.size()); }

    // m_K, the number of atoms of the finest sigma-algebra.
    std::int64_t atom_count() const noexcept { return scales_.back(); }

    // m_{K+1} = 2*m_K, one step into the padded position.
    std::int64_t padded_count() const noexcept { return 2 * scales_.back(); }

    // p_i for 1 <= i <= K+1; position K+1 is the padding radix 2.
    int radix(int i) const {
        if (i < 1 || i > levels() + 1) throw std::out_of_range("SystemSpec::radix: level out of range");
        return i <= levels() ? radices_[static_cast<std::size_t>(i) - 1] : 2;
    }

    // m_l for 0 <= l <= K+1.
    std::int64_t scale(int l) const {
        if (l < 0 || l > levels() + 1) throw std::out_of_range("SystemSpec::scale: level out of range");
        return l <= levels() ? scales_[static_cast<std::size_t>(l)] : padded_count();
    }

    int max_radix() const noexcept { return max_radix_; }

    const std::vector<int>& radices() const noexcept { return radices_; }

    // The same system with the padding position promoted to a real level.
    SystemSpec padded() const {
        std::vector<int> r = radices_;
        r.push_back(2);
        return SystemSpec(std::move(r));
    }

    friend bool operator==(const SystemSpec& x, const SystemSpec& y) noexcept {
        return x.radices_ == y.radices_;
    }

private:
    std::vector<int> radices_;
    std::vector<std::int64_t> scales_;  // m_0..m_K
    int max_radix_ = 2;
};

inline SystemSpec build_spec(const std::vector<int>& radices, int depth) {
    if (depth < 1)
        throw std::invalid_argument("build_spec: depth must be at least 1");
    if (static_cast<int>(radices.size()) != depth)
        throw std::invalid_argument("build_spec: expected " + std::to_string(depth) +
                                    " radices, got " + std::to_string(radices.size()));
    return SystemSpec(radices);
}

// Digit vector alpha_1..alpha_{K+1}.  The last entry is the padding digit; it
// is zero for all values below m_K.
struct Digits {
    std::vector<int> d;

    // alpha_i, 1-based level index.
    int at(int i) const { return d.at(static_cast<std::size_t>(i) - 1); }
};

inline Digits to_digits(std::int64_t n, const SystemSpec& spec) {
    if (n < 0 || n >= spec.padded_count())
        throw std::out_of_range("to_digits: value " + std::to_string(n) + " outside [0, 2*m_K)");
    Digits out;
    out.d.resize(static_cast<std::size_t>(spec.levels()) + 1);
    for (int i = 1; i <= spec.levels() + 1; ++i) {
        const int p = spec.radix(i);
        out.d[static_cast<std::size_t>(i) - 1] = static_cast<int>(n % p);
        n /= p;
    }
    return out;
}

inline std::int64_t from_digits(const Digits& digits, const SystemSpec& spec) {
    if (digits.d.size() != static_cast<std::size_t>(spec.levels()) + 1)
        throw std::invalid_argument("from_digits: digit count does not match the system depth");
    std::int64_t n = 0;
    for (int i = 1; i <= spec.levels() + 1; ++i) {
        const int a = digits.d[static_cast<std::size_t>(i) - 1];
        if (a < 0 || a >= spec.radix(i))
            throw std::out_of_range("from_digits: digit alpha_" + std::to_string(i) + " out of range");
        n += a * spec.scale(i - 1);
    }
    return n;
}

namespace detail {
inline void check_group_operand(std::int64_t n, const SystemSpec& spec, const char* who) {
    if (n < 0 || n >= spec.padded_count())
        throw std::out_of_range(std::string(who) + ": operand " + std::to_string(n) +
                                " outside [0, 2*m_K)");
}
}  // namespace detail

// k (+) l: digitwise (alpha_i + beta_i) mod p_i.  Abelian group law with
// identity 0; the character product law reads w_k * w_l = w_{k (+) l}.
inline std::int64_t dot_plus(std::int64_t k, std::int64_t l, const SystemSpec& spec) {
    detail::check_group_operand(k, spec, "dot_plus");
    detail::check_group_operand(l, spec, "dot_plus");
    std::int64_t out = 0;
    for (int i = 1; i <= spec.levels() + 1; ++i) {
        const int p = spec.radix(i);
        out += (k % p + l % p) % p * spec.scale(i - 1);
        k /= p;
        l /= p;
    }
    return out;
}

// (-) k: the inverse for dot_plus; digitwise (p_i - alpha_i) mod p_i.
inline std::int64_t dot_neg(std::int64_t k, const SystemSpec& spec) {
    detail::check_group_operand(k, spec, "dot_neg");
    std::int64_t out = 0;
    for (int i = 1; i <= spec.levels() + 1; ++i) {
        const int p = spec.radix(i);
        out += (p - static_cast<int>(k % p)) % p * spec.scale(i - 1);
        k /= p;
    }
    return out;
}

inline std::int64_t dot_minus(std::int64_t k, std::int64_t l, const SystemSpec& spec) {
    return dot_plus(k, dot_neg(l, spec), spec);
}

// Half-open integer segment [a, b) inside [0, m_K].
struct IntervalZ {
    std::int64_t a = 0;
    std::int64_t b = 0;

    std::int64_t length() const noexcept { return b - a; }
    bool contains(std::int64_t n) const noexcept { return n >= a && n < b; }

    friend bool operator==(const IntervalZ&, const IntervalZ&) noexcept = default;
};

inline void validate_interval(const IntervalZ& seg, const SystemSpec& spec) {
    if (seg.a < 0 || seg.a >= seg.b || seg.b > spec.atom_count())
        throw std::invalid_argument("interval [" + std::to_string(seg.a) + ", " +
                                    std::to_string(seg.b) + ") must satisfy 0 <= a < b <= m_K");
}

}  // namespace vilenkin

#pragma once

#include "vilenkin/operators.hpp"
#include "vilenkin/system.hpp"
#include "vilenkin/transform.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

// Structure theory of an integer interval [a, b) under the digit group.
//
// Write beta for the digits of b and alpha for the digits of a, both taken
// with the padding position included so that b = m_K is representable.  The
// segments
//
//     end run j:    [b - b mod m_j, b - b mod m_j + beta_j * m_{j-1})
//
// partition [0, b) from the top digit of b downward; t is the unique level
// whose end run contains a.  Above a the interval is instead completed by
//
//     start run j:  digits above j frozen to alpha, digit j running over
//                   (alpha_j, p_j) for j < t and over (alpha_t, beta_t) at
//                   level t, lower digits free,
//
// and [a, b) is the disjoint union of {a}, the start runs j = 1..t and the
// end runs j = 1..t-1.  Each nonempty run, shifted by its own endpoint under
// the digit group, lands exactly on a union of level-j blocks; that is what
// ties the decomposition to the block projections in operators.hpp.

namespace vilenkin {

enum class PieceKind { anchor, start_run, end_run };

struct Piece {
    PieceKind kind = PieceKind::anchor;
    int level = 0;             // j; 0 for the anchor
    std::int64_t shift = 0;    // a for anchor/start runs, b for end runs
    IntervalZ range{0, 0};     // a == b encodes an empty piece
    std::vector<int> branches; // block branches of range (-) shift; empty iff the range is

    bool is_empty() const noexcept { return range.length() == 0; }
};

struct Decomposition {
    IntervalZ interval;
    int top_level = 0;      // t
    int leading_level = 0;  // highest nonzero digit position of b
    std::vector<Piece> pieces;  // anchor, start runs j=1..t, end runs j=1..t-1
};

inline Decomposition decompose_interval(const IntervalZ& seg, const SystemSpec& spec) {
    validate_interval(seg, spec);
    const int depth = spec.levels() + 1;
    const Digits alpha = to_digits(seg.a, spec);
    const Digits beta = to_digits(seg.b, spec);

    int leading = depth;
    while (leading >= 1 && beta.at(leading) == 0) --leading;

    // Locate t: scan the end runs of [0, b) from the top until one holds a.
    int top = 0;
    std::int64_t prefix = 0;
    for (int j = leading; j >= 1; --j) {
        const std::int64_t len = beta.at(j) * spec.scale(j - 1);
        if (top == 0 && seg.a >= prefix && seg.a < prefix + len) top = j;
        prefix += len;
    }
    if (prefix != seg.b || top == 0)
        throw std::logic_error("decompose_interval: end runs failed to cover [0, b)");

    Decomposition dec;
    dec.interval = seg;
    dec.top_level = top;
    dec.leading_level = leading;

    Piece anchor;
    anchor.kind = PieceKind::anchor;
    anchor.level = 0;
    anchor.shift = seg.a;
    anchor.range = IntervalZ{seg.a, seg.a + 1};
    dec.pieces.push_back(anchor);

    for (int j = 1; j <= top; ++j) {
        Piece run;
        run.kind = PieceKind::start_run;
        run.level = j;
        run.shift = seg.a;
        const std::int64_t base = seg.a - seg.a % spec.scale(j);
        const int digit_end = j < top ? spec.radix(j) : beta.at(top);
        run.range = IntervalZ{base + (alpha.at(j) + 1) * spec.scale(j - 1),
                              base + digit_end * spec.scale(j - 1)};
        for (int l = 1; l <= digit_end - 1 - alpha.at(j); ++l) run.branches.push_back(l);
        dec.pieces.push_back(std::move(run));
    }

    for (int j = 1; j <= top - 1; ++j) {
        Piece run;
        run.kind = PieceKind::end_run;
        run.level = j;
        run.shift = seg.b;
        const std::int64_t base = seg.b - seg.b % spec.scale(j);
        run.range = IntervalZ{base, base + beta.at(j) * spec.scale(j - 1)};
        for (int l = spec.radix(j) - beta.at(j); l <= spec.radix(j) - 1; ++l)
            run.branches.push_back(l);
        dec.pieces.push_back(std::move(run));
    }
    return dec;
}

// Enumerates range (-) shift and checks it is exactly the union of the
// level-j blocks named by the branch list; returns (level, branches).
inline std::pair<int, std::vector<int>> shifted_blocks(const Piece& piece,
                                                       const SystemSpec& spec) {
    if (piece.kind == PieceKind::anchor) {
        if (dot_minus(piece.range.a, piece.shift, spec) != 0)
            throw std::logic_error("shifted_blocks: anchor does not shift to zero");
        return {0, {}};
    }
    if (piece.is_empty()) return {piece.level, {}};

    std::vector<std::int64_t> image;
    for (std::int64_t x = piece.range.a; x < piece.range.b; ++x)
        image.push_back(dot_minus(x, piece.shift, spec));
    std::sort(image.begin(), image.end());

    std::vector<std::int64_t> expected;
    for (const int l : piece.branches) {
        const IntervalZ blk = block_range({piece.level, l}, spec);
        for (std::int64_t x = blk.a; x < blk.b; ++x) expected.push_back(x);
    }
    std::sort(expected.begin(), expected.end());

    if (image != expected)
        throw std::logic_error("shifted_blocks: shifted piece is not the stated block union");
    return {piece.level, piece.branches};
}

struct SplitParts {
    Decomposition decomposition;
    std::vector<Spectrum> start_parts;  // index 0 is the anchor part, then runs j=1..t
    std::vector<Spectrum> end_parts;    // runs j=1..t-1
};

// Restriction of a spectrum supported on [a, b) to the decomposition pieces.
inline SplitParts split_function(const Spectrum& F, const IntervalZ& seg,
                                 const SystemSpec& spec) {
    detail::check_spectrum(F, spec, "split_function");
    validate_interval(seg, spec);
    for (std::int64_t n = 0; n < spec.atom_count(); ++n)
        if (!seg.contains(n) && F.coeffs[static_cast<std::size_t>(n)] != cplx{})
            throw std::invalid_argument("split_function: spectrum has support outside [a, b)");

    SplitParts parts;
    parts.decomposition = decompose_interval(seg, spec);
    const Spectrum zero{std::vector<cplx>(F.coeffs.size(), cplx{})};
    for (const Piece& piece : parts.decomposition.pieces) {
        Spectrum part = piece.is_empty() ? zero : project(F, piece.range, spec);
        if (piece.kind == PieceKind::end_run)
            parts.end_parts.push_back(std::move(part));
        else
            parts.start_parts.push_back(std::move(part));
    }
    return parts;
}

// Residuals of the five split identities, evaluated in the padded system so
// that the endpoint b = m_K keeps a character.  With ga = (w_a^{-1} f)^ and
// gb = (w_b^{-1} f)^:
//
//   start_bands:       a-modulated start part j has spectrum delta_j ga,
//                      j = 0..t-1;
//   start_top:         a-modulated start part t is the block sum over
//                      l = 1..beta_t-1-alpha_t of delta_{t,l} ga;
//   end_to_top_block:  the a-modulated sum of end parts is block
//                      beta_t-alpha_t of level t of ga;
//   end_bands:         b-modulated end part j has spectrum delta_j gb,
//                      j = 1..t-1;
//   start_to_top_band: the b-modulated sum of start parts is delta_t gb.
struct IdentityReport {
    double start_bands = 0.0;
    double start_top = 0.0;
    double end_to_top_block = 0.0;
    double end_bands = 0.0;
    double start_to_top_band = 0.0;

    double max_residual() const {
        return std::max({start_bands, start_top, end_to_top_block, end_bands, start_to_top_band});
    }
};

namespace detail {
inline Spectrum zero_extend(const Spectrum& F, const SystemSpec& wide) {
    Spectrum out = F;
    out.coeffs.resize(static_cast<std::size_t>(wide.atom_count()), cplx{});
    return out;
}
inline double residual(const Spectrum& x, const Spectrum& y) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.coeffs.size(); ++i)
        m = std::max(m, std::abs(x.coeffs[i] - y.coeffs[i]));
    return m;
}
}  // namespace detail

inline IdentityReport verify_identities(const Spectrum& F, const IntervalZ& seg,
                                        const SystemSpec& spec) {
    SplitParts parts = split_function(F, seg, spec);
    const int top = parts.decomposition.top_level;
    const SystemSpec wide = spec.padded();
    const Digits alpha = to_digits(seg.a, spec);
    const Digits beta = to_digits(seg.b, spec);

    // Modulating in atom space and re-transforming exercises the transform
    // pair; the band projections on the right come straight from the masks.
    const auto modulated = [&](const Spectrum& part, std::int64_t endpoint) {
        const Signal atoms = fast_inverse(detail::zero_extend(part, wide), wide);
        return fast_forward(modulate(atoms, endpoint, Modulation::inverse, wide), wide);
    };

    const Spectrum ga = modulated(F, seg.a);
    const Spectrum gb = modulated(F, seg.b);

    IdentityReport report;

    for (int j = 0; j <= top - 1; ++j) {
        const Spectrum lhs = modulated(parts.start_parts[static_cast<std::size_t>(j)], seg.a);
        report.start_bands =
            std::max(report.start_bands, detail::residual(lhs, delta_k(ga, j, wide)));
    }

    {
        const Spectrum lhs = modulated(parts.start_parts[static_cast<std::size_t>(top)], seg.a);
        Spectrum rhs{std::vector<cplx>(lhs.coeffs.size(), cplx{})};
        for (int l = 1; l <= beta.at(top) - 1 - alpha.at(top); ++l) {
            const Spectrum blk = delta_kl(ga, {top, l}, wide);
            for (std::size_t i = 0; i < rhs.coeffs.size(); ++i) rhs.coeffs[i] += blk.coeffs[i];
        }
        report.start_top = detail::residual(lhs, rhs);
    }

    {
        Spectrum tail{std::vector<cplx>(F.coeffs.size(), cplx{})};
        for (const Spectrum& part : parts.end_parts)
            for (std::size_t i = 0; i < tail.coeffs.size(); ++i) tail.coeffs[i] += part.coeffs[i];
        const Spectrum lhs = modulated(tail, seg.a);
        const Spectrum rhs = delta_kl(ga, {top, beta.at(top) - alpha.at(top)}, wide);
        report.end_to_top_block = detail::residual(lhs, rhs);
    }

    for (int j = 1; j <= top - 1; ++j) {
        const Spectrum lhs = modulated(parts.end_parts[static_cast<std::size_t>(j) - 1], seg.b);
        report.end_bands =
            std::max(report.end_bands, detail::residual(lhs, delta_k(gb, j, wide)));
    }

    {
        Spectrum head{std::vector<cplx>(F.coeffs.size(), cplx{})};
        for (const Spectrum& part : parts.start_parts)
            for (std::size_t i = 0; i < head.coeffs.size(); ++i) head.coeffs[i] += part.coeffs[i];
        const Spectrum lhs = modulated(head, seg.b);
        const Spectrum rhs = delta_k(gb, top, wide);
        report.start_to_top_band = detail::residual(lhs, rhs);
    }

    return report;
}

// One summand of the recombination operator: the level/branches blocks of
// the member's spectrum, transported by the character of index shift.
struct GTerm {
    Spectrum member;
    int level = 1;
    std::vector<int> branches;
    std::int64_t shift = 0;
};

// G applied to a term list: coefficients of block x move to x (+) shift.
// The shifted blocks must be pairwise disjoint across the whole list; the
// operator then satisfies ||G h||_2^2 = sum of the block energies.
inline Spectrum apply_G(const std::vector<GTerm>& terms, const SystemSpec& spec) {
    const std::int64_t n_atoms = spec.atom_count();
    std::vector<char> taken(static_cast<std::size_t>(n_atoms), 0);
    Spectrum out{std::vector<cplx>(static_cast<std::size_t>(n_atoms), cplx{})};
    for (const GTerm& term : terms) {
        detail::check_spectrum(term.member, spec, "apply_G");
        if (term.shift < 0 || term.shift >= n_atoms)
            throw std::out_of_range("apply_G: shift outside [0, m_K)");
        for (const int l : term.branches) {
            const IntervalZ blk = block_range({term.level, l}, spec);
            for (std::int64_t x = blk.a; x < blk.b; ++x) {
                const std::int64_t y = dot_plus(x, term.shift, spec);
                auto& slot = taken[static_cast<std::size_t>(y)];
                if (slot)
                    throw std::invalid_argument("apply_G: shifted blocks overlap at index " +
                                                std::to_string(y));
                slot = 1;
                out.coeffs[static_cast<std::size_t>(y)] =
                    term.member.coeffs[static_cast<std::size_t>(x)];
            }
        }
    }
    return out;
}

// Two-row rendering of a decomposition: one column per level from the
// leading digit of b down to 1, scales above, digit patterns below.
inline std::string describe(const Decomposition& dec, const SystemSpec& spec) {
    const Digits alpha = to_digits(dec.interval.a, spec);
    const Digits beta = to_digits(dec.interval.b, spec);
    const int lead = dec.leading_level;

    const auto cells_for = [&](const Piece& piece) {
        std::vector<std::string> cells;
        for (int i = lead; i >= 1; --i) {
            if (piece.kind == PieceKind::anchor) {
                cells.push_back(std::to_string(alpha.at(i)));
                continue;
            }
            const Digits& upper = piece.kind == PieceKind::start_run ? alpha : beta;
            if (i > piece.level) {
                cells.push_back(std::to_string(upper.at(i)));
            } else if (i < piece.level) {
                cells.push_back("*");
            } else if (piece.kind == PieceKind::start_run) {
                const int hi =
                    piece.level < dec.top_level ? spec.radix(i) - 1 : beta.at(dec.top_level) - 1;
                cells.push_back("[" + std::to_string(alpha.at(i) + 1) + ".." + std::to_string(hi) +
                                "]");
            } else {
                cells.push_back("[0.." + std::to_string(beta.at(i) - 1) + "]");
            }
        }
        return cells;
    };

    const auto label_for = [](const Piece& piece) {
        switch (piece.kind) {
            case PieceKind::anchor:
                return std::string("anchor");
            case PieceKind::start_run:
                return "start j=" + std::to_string(piece.level);
            default:
                return "end   j=" + std::to_string(piece.level);
        }
    };

    std::vector<std::string> labels{"scales"};
    std::vector<std::string> segments{""};
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> notes{""};
    {
        std::vector<std::string> head;
        for (int i = lead; i >= 1; --i) head.push_back(std::to_string(spec.scale(i - 1)));
        rows.push_back(std::move(head));
    }
    for (const Piece& piece : dec.pieces) {
        labels.push_back(label_for(piece));
        if (piece.is_empty()) {
            segments.emplace_back("empty");
            rows.emplace_back();
            notes.emplace_back("");
            continue;
        }
        segments.push_back("[" + std::to_string(piece.range.a) + ", " +
                           std::to_string(piece.range.b - 1) + "]");
        rows.push_back(cells_for(piece));
        if (piece.kind == PieceKind::anchor) {
            notes.push_back("shift " + std::to_string(piece.shift) + " -> {0}");
        } else {
            std::string blocks;
            for (std::size_t i = 0; i < piece.branches.size(); ++i)
                blocks += (i ? ", " : "") + std::to_string(piece.branches[i]);
            notes.push_back("shift " + std::to_string(piece.shift) + " -> level " +
                            std::to_string(piece.level) + " blocks {" + blocks + "}");
        }
    }

    std::size_t cell_width = 1;
    for (const auto& row : rows)
        for (const auto& cell : row) cell_width = std::max(cell_width, cell.size());
    std::size_t label_width = 0, segment_width = 0;
    for (const auto& s : labels) label_width = std::max(label_width, s.size());
    for (const auto& s : segments) segment_width = std::max(segment_width, s.size());

    std::ostringstream out;
    out << "[" << dec.interval.a << ", " << dec.interval.b << ") over p = (";
    for (int i = 1; i <= spec.levels(); ++i) out << (i > 1 ? ", " : "") << spec.radix(i);
    out << "), t = " << dec.top_level << "\n";
    for (std::size_t r = 0; r < labels.size(); ++r) {
        out << "  " << std::left << std::setw(static_cast<int>(label_width)) << labels[r] << "  "
            << std::setw(static_cast<int>(segment_width)) << segments[r] << " ";
        std::string line;
        for (const auto& cell : rows[r]) {
            line += ' ';
            line += std::string(cell_width - cell.size(), ' ') + cell;
        }
        out << line;
        if (!notes[r].empty()) out << "   " << notes[r];
        out << "\n";
    }
    return out.str();
}

}  // namespace vilenkin

#include "vilenkin/decomposition.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

using namespace vilenkin;

namespace {

double unit(std::mt19937_64& eng) { return (eng() >> 11) * 0x1.0p-53; }

Spectrum random_supported(std::mt19937_64& eng, const IntervalZ& seg, const SystemSpec& spec) {
    Spectrum F;
    F.coeffs.assign(static_cast<std::size_t>(spec.atom_count()), cplx{});
    for (std::int64_t n = seg.a; n < seg.b; ++n)
        F.coeffs[static_cast<std::size_t>(n)] = cplx{2.0 * unit(eng) - 1.0, 2.0 * unit(eng) - 1.0};
    return F;
}

// Brute-force covering oracle: the nonempty pieces tile [a, b) exactly.
void expect_exact_tiling(const Decomposition& dec, const IntervalZ& seg) {
    std::set<std::int64_t> seen;
    for (const Piece& piece : dec.pieces) {
        for (std::int64_t x = piece.range.a; x < piece.range.b; ++x) {
            EXPECT_TRUE(seg.contains(x)) << "piece spills at " << x;
            EXPECT_TRUE(seen.insert(x).second) << "pieces overlap at " << x;
        }
        EXPECT_EQ(piece.is_empty(), piece.branches.empty() && piece.kind != PieceKind::anchor)
            << "branch list and emptiness disagree";
    }
    EXPECT_EQ(static_cast<std::int64_t>(seen.size()), seg.length());
}

// Independent branch-set oracle, straight from the digit patterns.
std::vector<int> expected_branches(const Piece& piece, const Decomposition& dec,
                                   const SystemSpec& spec) {
    const Digits alpha = to_digits(dec.interval.a, spec);
    const Digits beta = to_digits(dec.interval.b, spec);
    std::vector<int> out;
    if (piece.kind == PieceKind::start_run) {
        const int hi = piece.level < dec.top_level ? spec.radix(piece.level) - 1
                                                   : beta.at(dec.top_level) - 1;
        for (int l = 1; l <= hi - alpha.at(piece.level); ++l) out.push_back(l);
    } else if (piece.kind == PieceKind::end_run) {
        for (int l = spec.radix(piece.level) - beta.at(piece.level);
             l <= spec.radix(piece.level) - 1; ++l)
            out.push_back(l);
    }
    return out;
}

}  // namespace

TEST(Decompose, FrozenInterval_3_10) {
    const SystemSpec spec({2, 3, 2});
    const Decomposition dec = decompose_interval({3, 10}, spec);
    EXPECT_EQ(dec.top_level, 3);
    EXPECT_EQ(dec.leading_level, 3);
    ASSERT_EQ(dec.pieces.size(), 6u);  // anchor, start 1..3, end 1..2

    EXPECT_EQ(dec.pieces[0].kind, PieceKind::anchor);
    EXPECT_EQ(dec.pieces[0].range, (IntervalZ{3, 4}));

    EXPECT_EQ(dec.pieces[1].level, 1);
    EXPECT_TRUE(dec.pieces[1].is_empty());

    EXPECT_EQ(dec.pieces[2].level, 2);
    EXPECT_EQ(dec.pieces[2].range, (IntervalZ{4, 6}));
    EXPECT_EQ(dec.pieces[2].branches, (std::vector<int>{1}));
    EXPECT_EQ(dec.pieces[2].shift, 3);

    EXPECT_EQ(dec.pieces[3].level, 3);
    EXPECT_TRUE(dec.pieces[3].is_empty());

    EXPECT_EQ(dec.pieces[4].kind, PieceKind::end_run);
    EXPECT_EQ(dec.pieces[4].level, 1);
    EXPECT_TRUE(dec.pieces[4].is_empty());

    EXPECT_EQ(dec.pieces[5].level, 2);
    EXPECT_EQ(dec.pieces[5].range, (IntervalZ{6, 10}));
    EXPECT_EQ(dec.pieces[5].branches, (std::vector<int>{1, 2}));
    EXPECT_EQ(dec.pieces[5].shift, 10);
}

TEST(Decompose, FrozenInterval_0_6) {
    const SystemSpec spec({2, 3, 2});
    const Decomposition dec = decompose_interval({0, 6}, spec);
    EXPECT_EQ(dec.top_level, 3);
    ASSERT_EQ(dec.pieces.size(), 6u);
    EXPECT_EQ(dec.pieces[1].range, (IntervalZ{1, 2}));
    EXPECT_EQ(dec.pieces[1].branches, (std::vector<int>{1}));
    EXPECT_EQ(dec.pieces[2].range, (IntervalZ{2, 6}));
    EXPECT_EQ(dec.pieces[2].branches, (std::vector<int>{1, 2}));
    EXPECT_TRUE(dec.pieces[3].is_empty());
    EXPECT_TRUE(dec.pieces[4].is_empty());
    EXPECT_TRUE(dec.pieces[5].is_empty());
}

TEST(Decompose, FrozenSingleton_5_6) {
    const SystemSpec spec({2, 3, 2});
    const Decomposition dec = decompose_interval({5, 6}, spec);
    EXPECT_EQ(dec.top_level, 3);
    EXPECT_EQ(dec.pieces[0].range, (IntervalZ{5, 6}));
    for (std::size_t i = 1; i < dec.pieces.size(); ++i)
        EXPECT_TRUE(dec.pieces[i].is_empty()) << "piece " << i;
}

TEST(Decompose, FullRangeUsesThePaddingLevel) {
    const SystemSpec spec({2, 3, 2});
    const Decomposition dec = decompose_interval({0, 12}, spec);
    EXPECT_EQ(dec.top_level, 4);
    EXPECT_EQ(dec.leading_level, 4);
    expect_exact_tiling(dec, {0, 12});
    // Start runs at levels 1..3 carry the whole of [1, 12); level 4 is empty.
    EXPECT_TRUE(dec.pieces[4].is_empty());
    for (const Piece& piece : dec.pieces)
        if (!piece.is_empty() && piece.kind != PieceKind::anchor)
            EXPECT_EQ(piece.kind, PieceKind::start_run);
}

TEST(Decompose, ExhaustiveTilingAndBlockForms) {
    for (const auto& radices :
         {std::vector<int>{2, 3, 2}, {2, 3, 4}, {5, 5}, {2, 3, 2, 3}}) {
        const SystemSpec spec(radices);
        for (std::int64_t a = 0; a < spec.atom_count(); ++a)
            for (std::int64_t b = a + 1; b <= spec.atom_count(); ++b) {
                const IntervalZ seg{a, b};
                const Decomposition dec = decompose_interval(seg, spec);
                expect_exact_tiling(dec, seg);
                EXPECT_LE(static_cast<int>(dec.pieces.size()), 2 * spec.levels() + 2);
                for (const Piece& piece : dec.pieces) {
                    EXPECT_EQ(expected_branches(piece, dec, spec), piece.branches);
                    const auto [level, branches] = shifted_blocks(piece, spec);
                    EXPECT_EQ(level, piece.level);
                    EXPECT_EQ(branches, piece.branches);
                }
            }
    }
}

TEST(Decompose, RejectsBadIntervals) {
    const SystemSpec spec({2, 3, 2});
    EXPECT_THROW(decompose_interval({5, 5}, spec), std::invalid_argument);
    EXPECT_THROW(decompose_interval({-1, 5}, spec), std::invalid_argument);
    EXPECT_THROW(decompose_interval({0, 13}, spec), std::invalid_argument);
}

TEST(ShiftedBlocks, DetectsTamperedPiece) {
    const SystemSpec spec({2, 3, 2});
    Decomposition dec = decompose_interval({3, 10}, spec);
    Piece bad = dec.pieces[2];
    bad.branches = {2};  // range [4, 6) shifts to block 1, not block 2
    EXPECT_THROW(shifted_blocks(bad, spec), std::logic_error);
}

TEST(SplitFunction, PartsRestoreTheSpectrum) {
    const SystemSpec spec({2, 3, 2});
    std::mt19937_64 eng(21);
    const IntervalZ seg{3, 10};
    const Spectrum F = random_supported(eng, seg, spec);
    const SplitParts parts = split_function(F, seg, spec);
    ASSERT_EQ(parts.start_parts.size(), 4u);  // anchor + runs 1..3
    ASSERT_EQ(parts.end_parts.size(), 2u);

    std::vector<cplx> sum(F.coeffs.size(), cplx{});
    int nonzero = 0;
    const auto accumulate = [&](const Spectrum& part) {
        bool any = false;
        for (std::size_t n = 0; n < sum.size(); ++n) {
            sum[n] += part.coeffs[n];
            any = any || part.coeffs[n] != cplx{};
        }
        nonzero += any;
    };
    for (const auto& part : parts.start_parts) accumulate(part);
    for (const auto& part : parts.end_parts) accumulate(part);
    EXPECT_EQ(nonzero, 3);  // anchor, start run 2, end run 2
    for (std::size_t n = 0; n < sum.size(); ++n) EXPECT_EQ(sum[n], F.coeffs[n]);
}

TEST(SplitFunction, RejectsOutsideSupport) {
    const SystemSpec spec({2, 3, 2});
    Spectrum F;
    F.coeffs.assign(12, cplx{});
    F.coeffs[11] = 1.0;
    EXPECT_THROW(split_function(F, {3, 10}, spec), std::invalid_argument);
}

TEST(Identities, HoldOnEveryIntervalOfTheSmallSystem) {
    const SystemSpec spec({2, 3, 2});
    std::mt19937_64 eng(33);
    for (std::int64_t a = 0; a < spec.atom_count(); ++a)
        for (std::int64_t b = a + 1; b <= spec.atom_count(); ++b) {
            const IntervalZ seg{a, b};
            const Spectrum F = random_supported(eng, seg, spec);
            const IdentityReport report = verify_identities(F, seg, spec);
            EXPECT_LT(report.max_residual(), 1e-10) << "[" << a << ", " << b << ")";
        }
}

TEST(Identities, HoldOnRandomIntervalsOfAFourLevelSystem) {
    const SystemSpec spec({2, 3, 2, 3});
    std::mt19937_64 eng(34);
    for (int rep = 0; rep < 60; ++rep) {
        const std::int64_t a = static_cast<std::int64_t>(eng() % 36);
        const std::int64_t b = a + 1 + static_cast<std::int64_t>(eng() % (36 - a));
        const IntervalZ seg{a, b};
        const Spectrum F = random_supported(eng, seg, spec);
        EXPECT_LT(verify_identities(F, seg, spec).max_residual(), 1e-10)
            << "[" << a << ", " << b << ")";
    }
}

TEST(Identities, SingletonAndUnitCoefficient) {
    const SystemSpec spec({2, 3, 2});
    Spectrum F;
    F.coeffs.assign(12, cplx{});
    F.coeffs[5] = cplx(0.4, -1.2);
    EXPECT_LT(verify_identities(F, {5, 6}, spec).max_residual(), 1e-12);
    Spectrum E;
    E.coeffs.assign(12, cplx{});
    E.coeffs[3] = 1.0;
    EXPECT_LT(verify_identities(E, {3, 10}, spec).max_residual(), 1e-12);
}

TEST(ApplyG, SingleTermIsTheBlockProjection) {
    const SystemSpec spec({2, 3, 2});
    std::mt19937_64 eng(40);
    const Spectrum h = random_supported(eng, {0, 12}, spec);
    const Spectrum out = apply_G({{h, 2, {1}, 0}}, spec);
    const Spectrum expect = delta_kl(h, {2, 1}, spec);
    for (std::size_t n = 0; n < 12; ++n) EXPECT_EQ(out.coeffs[n], expect.coeffs[n]);
}

TEST(ApplyG, EnergyAddsOverDisjointTerms) {
    const SystemSpec spec({2, 3, 2, 3});
    std::mt19937_64 eng(41);
    const Spectrum h1 = random_supported(eng, {0, 36}, spec);
    const Spectrum h2 = random_supported(eng, {0, 36}, spec);
    // Level-2 block {1} shifted by 0 covers [2, 4); level-1 block {1} shifted
    // by 6 covers {7}; level-4 block {2} shifted by 1 stays inside [24, 36).
    const std::vector<GTerm> terms{{h1, 2, {1}, 0}, {h1, 1, {1}, 6}, {h2, 4, {2}, 1}};
    const Spectrum out = apply_G(terms, spec);

    double lhs = 0.0;
    for (const auto& c : out.coeffs) lhs += std::norm(c);
    double rhs = 0.0;
    for (const auto& term : terms)
        for (const int l : term.branches) {
            const Spectrum blk = delta_kl(term.member, {term.level, l}, spec);
            for (const auto& c : blk.coeffs) rhs += std::norm(c);
        }
    EXPECT_NEAR(lhs, rhs, 1e-12);
    EXPECT_LE(lhs, [&] {
        double all = 0.0;
        for (const auto& c : h1.coeffs) all += std::norm(c);
        for (const auto& c : h2.coeffs) all += std::norm(c);
        return all + 1e-12;
    }());
}

TEST(ApplyG, RejectsOverlapAndBadShift) {
    const SystemSpec spec({2, 3, 2});
    Spectrum h;
    h.coeffs.assign(12, cplx(1.0, 0.0));
    EXPECT_THROW(apply_G({{h, 2, {1}, 0}, {h, 2, {1}, 0}}, spec), std::invalid_argument);
    EXPECT_THROW(apply_G({{h, 2, {1, 1}, 0}}, spec), std::invalid_argument);
    EXPECT_THROW(apply_G({{h, 2, {1}, 12}}, spec), std::out_of_range);
    EXPECT_THROW(apply_G({{h, 2, {3}, 0}}, spec), std::out_of_range);
    // Distinct blocks shifted onto each other: [2,4) (+) 2 meets [4,6).
    EXPECT_THROW(apply_G({{h, 2, {1}, 2}, {h, 2, {2}, 0}}, spec), std::invalid_argument);
}

TEST(Describe, RendersTheFrozenExample) {
    const SystemSpec spec({2, 3, 2});
    const std::string text = describe(decompose_interval({3, 10}, spec), spec);
    EXPECT_NE(text.find("[3, 10) over p = (2, 3, 2), t = 3"), std::string::npos);
    EXPECT_NE(text.find("anchor"), std::string::npos);
    EXPECT_NE(text.find("[4, 5]"), std::string::npos);
    EXPECT_NE(text.find("[6, 9]"), std::string::npos);
    EXPECT_NE(text.find("blocks {1, 2}"), std::string::npos);
    EXPECT_NE(text.find("empty"), std::string::npos);
}

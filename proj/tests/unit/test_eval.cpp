#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include <json.hpp>

#include "oracles.hpp"
#include "raftcensus/error.hpp"
#include "raftcensus/eval.hpp"

using namespace raftcensus;

namespace {

Census census_at(const std::vector<std::pair<double, double>>& pts) {
    Census c;
    int id = 1;
    for (auto [r, col] : pts) {
        CensusRecord rec;
        rec.id = id++;
        rec.centroid_row = r;
        rec.centroid_col = col;
        rec.area_px = 9;
        c.records.push_back(rec);
    }
    return c;
}

std::vector<TruthPoint> truth_at(const std::vector<std::pair<double, double>>& pts) {
    std::vector<TruthPoint> t;
    int id = 1;
    for (auto [r, c] : pts) t.push_back({id++, r, c});
    return t;
}

std::vector<MatchPair> fake_matches(std::size_t n) {
    std::vector<MatchPair> m;
    for (std::size_t i = 0; i < n; ++i) m.push_back({static_cast<int>(i + 1), static_cast<int>(i + 1), 0.0});
    return m;
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

TEST(Match, IdenticalLists) {
    const std::vector<std::pair<double, double>> pts = {{10, 10}, {20, 40}, {55.5, 3}};
    const auto m = match_detections(census_at(pts), truth_at(pts));
    ASSERT_EQ(m.size(), 3u);
    for (const auto& p : m) {
        EXPECT_EQ(p.distance, 0.0);
        EXPECT_EQ(p.detection_id, p.truth_id);
    }
}

TEST(Match, EmptyCensus) {
    const auto truth = truth_at({{1, 1}, {5, 5}, {9, 9}, {20, 1}, {30, 30}});
    const auto r = evaluate_census(Census{}, truth);
    EXPECT_TRUE(r.matches.empty());
    EXPECT_EQ(r.missed, 5u);
    EXPECT_EQ(r.tfr_percent, 100.0);
    EXPECT_EQ(r.tfa_percent, 0.0);
    EXPECT_TRUE(r.tfa_undefined);
}

TEST(Match, GateIsRespected) {
    const auto m = match_detections(census_at({{0, 0}}), truth_at({{3, 0.5}}), 3.0);
    EXPECT_TRUE(m.empty());
    EXPECT_EQ(match_detections(census_at({{0, 0}}), truth_at({{3, 0}}), 3.0).size(), 1u);
}

TEST(Match, GreedyTakesNearestFirst) {
    const auto m = match_detections(census_at({{0, 0}, {0, 2}}), truth_at({{0, 1.8}}), 3.0);
    ASSERT_EQ(m.size(), 1u);
    EXPECT_EQ(m[0].detection_id, 2);
    EXPECT_NEAR(m[0].distance, 0.2, 1e-12);
}

TEST(Match, CountEqualsOptimalAssignment) {
    // Truths are spaced wider than two gates so every detection can reach at
    // most one truth; on such instances greedy is optimal.
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> jitter(-2.5, 2.5);
    for (int k = 0; k < 300; ++k) {
        const int nt = 1 + static_cast<int>(rng() % 6);
        const int nd = 1 + static_cast<int>(rng() % 6);
        std::vector<std::pair<double, double>> truth, det;
        for (int i = 0; i < nt; ++i) truth.push_back({10.0 * i, 5.0 * (i % 2)});
        for (int j = 0; j < nd; ++j) {
            const auto& t = truth[rng() % truth.size()];
            det.push_back({t.first + jitter(rng), t.second + jitter(rng)});
        }
        const auto m = match_detections(census_at(det), truth_at(truth), 3.0);
        EXPECT_EQ(static_cast<int>(m.size()), oracle::max_matching_brute(det, truth, 3.0)) << "case " << k;
    }
}

TEST(Match, OneToOne) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0, 15);
    for (int k = 0; k < 100; ++k) {
        std::vector<std::pair<double, double>> a, b;
        for (int i = 0; i < 8; ++i) a.push_back({u(rng), u(rng)});
        for (int i = 0; i < 8; ++i) b.push_back({u(rng), u(rng)});
        const auto m = match_detections(census_at(a), truth_at(b), 3.0);
        std::set<int> ds, ts;
        for (const auto& p : m) {
            EXPECT_TRUE(ds.insert(p.detection_id).second);
            EXPECT_TRUE(ts.insert(p.truth_id).second);
            EXPECT_LE(p.distance, 3.0);
        }
    }
}

TEST(Rates, FormulaArithmetic) {
    const auto r = compute_rates(fake_matches(8), 10, 9);
    EXPECT_DOUBLE_EQ(r.tfa_percent, 20.0);
    EXPECT_NEAR(r.tfr_percent, 100.0 / 9.0, 1e-12);
    const auto s = compute_rates(fake_matches(19), 21, 20);
    EXPECT_EQ(s.false_detections, 2u);
    EXPECT_EQ(s.missed, 1u);
    EXPECT_DOUBLE_EQ(s.tfr_percent, 5.0);
}

TEST(Rates, TwoFalseOfTenOneMissedOfTwenty) {
    // 10 detections with 2 false means 8 true positives; 20 platforms with
    // 1 missed means 19. The two statements only share a count when they
    // describe separate tallies, so check each formula on its own tally.
    const auto a = compute_rates(fake_matches(8), 10, 8);
    EXPECT_DOUBLE_EQ(a.tfa_percent, 20.0);
    const auto b = compute_rates(fake_matches(19), 19, 20);
    EXPECT_DOUBLE_EQ(b.tfr_percent, 5.0);
}

TEST(Rates, PerfectAndZeroDenominators) {
    const auto r = compute_rates(fake_matches(5), 5, 5);
    EXPECT_EQ(r.tfa_percent, 0.0);
    EXPECT_EQ(r.tfr_percent, 0.0);
    EXPECT_FALSE(r.tfa_undefined);
    const auto z = compute_rates({}, 0, 0);
    EXPECT_EQ(z.tfa_percent, 0.0);
    EXPECT_EQ(z.tfr_percent, 0.0);
    EXPECT_TRUE(z.tfa_undefined);
    EXPECT_TRUE(z.tfr_undefined);
}

TEST(Rates, TwoDecimalRatesFromTallies) {
    // Tallies giving 8.54/0.82 and 8.97/0.88 at two decimals.
    const auto ndwi = compute_rates(fake_matches(9146), 10000, 9222);
    EXPECT_EQ(round2(ndwi.tfa_percent), 8.54);
    EXPECT_EQ(round2(ndwi.tfr_percent), 0.82);
    const auto mlp = compute_rates(fake_matches(9103), 10000, 9184);
    EXPECT_EQ(round2(mlp.tfa_percent), 8.97);
    EXPECT_EQ(round2(mlp.tfr_percent), 0.88);
}

TEST(Rates, InconsistentCounts) {
    EXPECT_THROW(compute_rates(fake_matches(5), 4, 10), DataError);
    EXPECT_THROW(compute_rates(fake_matches(5), 10, 4), DataError);
}

TEST(Rates, CountIdentitiesAndBounds) {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 200; ++k) {
        const std::size_t tp = rng() % 50, fd = rng() % 10, ms = rng() % 10;
        const auto r = compute_rates(fake_matches(tp), tp + fd, tp + ms);
        EXPECT_EQ(r.total_detections, r.true_positives + r.false_detections);
        EXPECT_EQ(r.total_platforms, r.true_positives + r.missed);
        EXPECT_GE(r.tfa_percent, 0.0);
        EXPECT_LE(r.tfa_percent, 100.0);
        EXPECT_GE(r.tfr_percent, 0.0);
        EXPECT_LE(r.tfr_percent, 100.0);
    }
}

TEST(Rates, AddingPairsAndFalseDetections) {
    const auto base = compute_rates(fake_matches(5), 8, 9);
    const auto more = compute_rates(fake_matches(6), 9, 10);
    EXPECT_LE(more.tfa_percent, base.tfa_percent);
    EXPECT_LE(more.tfr_percent, base.tfr_percent);
    const auto extra_false = compute_rates(fake_matches(5), 9, 9);
    EXPECT_GT(extra_false.tfa_percent, base.tfa_percent);
}

TEST(Rates, InvariantUnderRelabeling) {
    const std::vector<std::pair<double, double>> d = {{0, 0}, {10, 10}, {20, 0}, {40, 40}};
    const std::vector<std::pair<double, double>> t = {{0.5, 0}, {10, 11}, {30, 30}};
    const auto a = evaluate_census(census_at(d), truth_at(t));
    std::vector<std::pair<double, double>> dr(d.rbegin(), d.rend()), tr(t.rbegin(), t.rend());
    const auto b = evaluate_census(census_at(dr), truth_at(tr));
    EXPECT_EQ(a.tfa_percent, b.tfa_percent);
    EXPECT_EQ(a.tfr_percent, b.tfr_percent);
    EXPECT_EQ(a.true_positives, 2u);
}

TEST(Report, JsonHasAllFields) {
    const auto r = evaluate_census(census_at({{0, 0}, {9, 9}}), truth_at({{0, 1}}));
    const auto j = nlohmann::json::parse(report_to_json(r));
    for (const char* k : {"tfa_percent", "tfr_percent", "tfa_undefined", "tfr_undefined", "true_positives",
                          "false_detections", "missed", "total_detections", "total_platforms", "matches"})
        EXPECT_TRUE(j.contains(k)) << k;
    EXPECT_EQ(j["tfa_percent"].get<double>(), 50.0);
    EXPECT_EQ(j["matches"].size(), 1u);
    EXPECT_NE(report_to_table(r).find("TFA"), std::string::npos);
}

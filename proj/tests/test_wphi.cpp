// Tests for the normalizing-mass ratio study: harvesting unique congruence
// classes from a uniform-law chain and estimating W(theta1)/W(theta2).
#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "ccm/csv.hpp"
#include "ccm/errors.hpp"
#include "ccm/graph.hpp"
#include "ccm/model.hpp"
#include "ccm/sampler.hpp"
#include "ccm/stats_math.hpp"
#include "ccm/wphi.hpp"

namespace {

std::vector<std::pair<int, int>> all_dyads(int n) {
  std::vector<std::pair<int, int>> d;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) d.push_back({i, j});
  return d;
}

ccm::Network network_from_mask(int n, std::uint64_t mask) {
  ccm::Network g(n);
  const auto dyads = all_dyads(n);
  for (std::size_t b = 0; b < dyads.size(); ++b)
    if (mask >> b & 1) g.add_edge(dyads[b].first, dyads[b].second);
  return g;
}

// Exhaustively enumerates the unique statistics over all graphs on n nodes.
std::vector<ccm::Statistic> enumerate_unique_stats(const ccm::CongruenceMapping& mapping,
                                                   int n) {
  std::set<std::string> seen;
  std::vector<ccm::Statistic> out;
  const auto dyads = all_dyads(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << dyads.size()); ++mask) {
    ccm::Statistic st = ccm::phi(network_from_mask(n, mask), mapping);
    if (seen.insert(ccm::statistic_key(st)).second) out.push_back(std::move(st));
  }
  return out;
}

std::set<std::string> key_set(const std::vector<ccm::Statistic>& stats) {
  std::set<std::string> keys;
  for (const auto& s : stats) keys.insert(ccm::statistic_key(s));
  return keys;
}

ccm::SamplerConfig harvest_cfg(std::int64_t burn, std::int64_t thin,
                               std::int64_t retained, std::uint64_t seed) {
  ccm::SamplerConfig cfg;
  cfg.burn_in = burn;
  cfg.thin = thin;
  cfg.iterations = burn + retained * thin;
  cfg.seed = seed;
  return cfg;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("truncated negative-binomial theta matches frozen values") {
  const auto wide = ccm::nb_truncated_pmf(1.02, 6.19, 100);
  REQUIRE(wide.size() == 100);
  CHECK(wide[0] == Catch::Approx(0.13604366249822913).margin(1e-12));
  CHECK(wide[5] == Catch::Approx(0.06639910799880155).margin(1e-12));
  CHECK(wide[20] == Catch::Approx(0.006916689852386168).margin(1e-12));

  const auto tight = ccm::nb_truncated_pmf(1000.0, 3.0, 100);
  CHECK(tight[0] == Catch::Approx(0.050011165934372305).margin(1e-12));
  CHECK(tight[3] == Catch::Approx(0.22370644344026733).margin(1e-12));

  double sum = 0.0;
  for (double v : wide) sum += v;
  CHECK(sum == Catch::Approx(1.0).margin(1e-12));

  CHECK_THROWS_AS(ccm::nb_truncated_pmf(0.0, 3.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(ccm::nb_truncated_pmf(1.0, -3.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(ccm::nb_truncated_pmf(1.0, 3.0, 0), std::invalid_argument);
}

TEST_CASE("harvest on three nodes finds exactly the achievable degree distributions") {
  const auto mapping = ccm::CongruenceMapping::degree();
  const auto exact = enumerate_unique_stats(mapping, 3);
  REQUIRE(exact.size() == 4);  // 8 graphs collapse onto 4 degree distributions

  const auto sample = ccm::harvest_unique_classes(mapping, 3, harvest_cfg(200, 2, 300, 11));
  CHECK(sample.draws == 300);
  CHECK(key_set(sample.stats) == key_set(exact));
}

TEST_CASE("harvest at n=10 finds thousands of unique degree distributions") {
  const auto mapping = ccm::CongruenceMapping::degree();
  const auto sample =
      ccm::harvest_unique_classes(mapping, 10, harvest_cfg(5000, 50, 20000, 3));
  CHECK(sample.draws == 20000);
  CHECK(sample.stats.size() > 1000);

  // Every harvested statistic is a valid degree distribution of a 10-node
  // simple graph, and no statistic repeats.
  std::set<std::string> keys;
  for (const auto& st : sample.stats) {
    const auto& d = std::get<ccm::DegreeDistribution>(st);
    REQUIRE(d.counts.size() == 10);
    CHECK(d.node_count() == 10);
    CHECK(d.degree_total() % 2 == 0);
    CHECK(keys.insert(ccm::statistic_key(st)).second);
  }
}

TEST_CASE("harvest rejects a classification that does not cover n") {
  const auto labels = ccm::NodeClassification::blockwise(std::vector<int>{3, 3});
  const auto mapping = ccm::CongruenceMapping::mixing(labels);
  CHECK_THROWS_AS(ccm::harvest_unique_classes(mapping, 7, harvest_cfg(10, 1, 10, 1)),
                  ccm::DataError);
}

TEST_CASE("w_ratio is exactly one for identical laws") {
  const auto mapping = ccm::CongruenceMapping::degree();
  const auto sample = ccm::harvest_unique_classes(mapping, 6, harvest_cfg(500, 5, 800, 5));
  REQUIRE(sample.stats.size() > 10);

  const ccm::ClassLaw law = ccm::MultinomialDegreeLaw(ccm::nb_truncated_pmf(1000.0, 3.0, 100));
  CHECK(ccm::w_ratio(sample, law, law) == 1.0);
  CHECK(ccm::log_w_ratio(sample, law, law) == 0.0);

  const ccm::ClassLaw uniform1 = ccm::UniformLaw{};
  const ccm::ClassLaw uniform2 = ccm::UniformLaw{};
  CHECK(ccm::w_ratio(sample, uniform1, uniform2) == 1.0);
}

TEST_CASE("w_ratio validates its inputs") {
  const auto mapping = ccm::CongruenceMapping::degree();
  const ccm::ClassLaw law = ccm::MultinomialDegreeLaw(ccm::nb_truncated_pmf(1000.0, 3.0, 100));

  ccm::ClassSample empty{mapping, {}, 0};
  CHECK_THROWS_AS(ccm::w_ratio(empty, law, law), ccm::DataError);

  // Every sampled class has zero mass under a point-mass law on degree 0.
  ccm::ClassSample sample{mapping, {}, 1};
  sample.stats.push_back(ccm::DegreeDistribution{{0, 2, 2, 0, 0, 0}});
  const ccm::ClassLaw point = ccm::MultinomialDegreeLaw({1.0, 0.0, 0.0, 0.0, 0.0, 0.0});
  CHECK_THROWS_AS(ccm::w_ratio(sample, point, law), ccm::DataError);
  CHECK_THROWS_AS(ccm::w_ratio(sample, law, point), ccm::DataError);

  // A mixing law cannot score a degree-distribution sample.
  const ccm::ClassLaw mix = ccm::PoissonMultinomialMixingLaw(2.0, {0.5, 0.3, 0.2});
  CHECK_THROWS_AS(ccm::w_ratio(sample, mix, law), ccm::DataError);
}

TEST_CASE("w_ratio telescopes and ignores sample order") {
  const auto mapping = ccm::CongruenceMapping::degree();
  const auto sample =
      ccm::harvest_unique_classes(mapping, 8, harvest_cfg(2000, 10, 2000, 21));
  REQUIRE(sample.stats.size() > 100);

  const ccm::ClassLaw a = ccm::MultinomialDegreeLaw(ccm::nb_truncated_pmf(1000.0, 2.5, 100));
  const ccm::ClassLaw b = ccm::MultinomialDegreeLaw(ccm::nb_truncated_pmf(1000.0, 3.2, 100));
  const ccm::ClassLaw c = ccm::MultinomialDegreeLaw(ccm::nb_truncated_pmf(1000.0, 4.1, 100));

  const double lab = ccm::log_w_ratio(sample, a, b);
  const double lbc = ccm::log_w_ratio(sample, b, c);
  const double lac = ccm::log_w_ratio(sample, a, c);
  CHECK(lab + lbc == Catch::Approx(lac).margin(1e-12));
  CHECK(ccm::w_ratio(sample, a, b) * ccm::w_ratio(sample, b, c) ==
        Catch::Approx(ccm::w_ratio(sample, a, c)).epsilon(1e-12));

  // Antisymmetry is exact: the two log masses are just subtracted either way.
  CHECK(ccm::log_w_ratio(sample, b, a) == -lab);

  ccm::ClassSample reversed = sample;
  std::reverse(reversed.stats.begin(), reversed.stats.end());
  CHECK(ccm::w_ratio(reversed, a, b) == Catch::Approx(ccm::w_ratio(sample, a, b)).epsilon(1e-12));
}

TEST_CASE("sampled ratio matches full enumeration on six-node mixing") {
  const auto labels = ccm::NodeClassification::blockwise(std::vector<int>{3, 3});
  const auto mapping = ccm::CongruenceMapping::mixing(labels);

  // Exact class space: cells bounded by capacities 3, 9, 3 -> 4*10*4 classes.
  const auto exact_stats = enumerate_unique_stats(mapping, 6);
  REQUIRE(exact_stats.size() == 160);
  ccm::ClassSample exact{mapping, exact_stats, 0};

  const auto sample =
      ccm::harvest_unique_classes(mapping, 6, harvest_cfg(3000, 25, 5000, 7));
  REQUIRE(sample.stats.size() == 160);  // chain saturates the class space
  CHECK(key_set(sample.stats) == key_set(exact_stats));

  const std::vector<double> alpha_even{1.0 / 3, 1.0 / 3, 1.0 / 3};
  const ccm::ClassLaw law1 = ccm::PoissonMultinomialMixingLaw(7.0, alpha_even);
  const ccm::ClassLaw law2 = ccm::PoissonMultinomialMixingLaw(8.4, alpha_even);
  const ccm::ClassLaw law3 = ccm::PoissonMultinomialMixingLaw(7.0, {0.5, 0.3, 0.2});

  const double exact_12 = ccm::w_ratio(exact, law1, law2);
  const double exact_13 = ccm::w_ratio(exact, law1, law3);

  // Same class set, so the sampled estimate agrees to rounding error --
  // comfortably inside the 2% contract for saturated samples.
  CHECK(ccm::w_ratio(sample, law1, law2) == Catch::Approx(exact_12).epsilon(1e-10));
  CHECK(ccm::w_ratio(sample, law1, law3) == Catch::Approx(exact_13).epsilon(1e-10));
  CHECK(ccm::w_ratio(sample, law1, law2) == Catch::Approx(exact_12).epsilon(0.02));

  // Discovery order is exchangeable, so a prefix is a uniform subsample; the
  // ratio stays close to the exact value even at 75% coverage.
  ccm::ClassSample partial = sample;
  partial.stats.resize(120);
  CHECK(ccm::w_ratio(partial, law1, law2) == Catch::Approx(exact_12).epsilon(0.10));

  // Harvesting under a non-uniform law concentrates the set on that law's
  // high-mass classes, which is all the ratio needs: still within 2% of exact.
  const auto targeted =
      ccm::harvest_unique_classes(mapping, 6, harvest_cfg(2000, 20, 3000, 9), law1);
  REQUIRE(targeted.stats.size() > 40);
  CHECK(ccm::w_ratio(targeted, law1, law2) == Catch::Approx(exact_12).epsilon(0.02));

  // Merging samples deduplicates across parts and preserves the mapping.
  const std::vector<ccm::ClassSample> parts{sample, targeted};
  const auto merged = ccm::merge_samples(parts);
  CHECK(merged.stats.size() == 160);  // targeted adds nothing new to saturation
  CHECK(merged.draws == sample.draws + targeted.draws);
  CHECK(ccm::w_ratio(merged, law1, law2) == Catch::Approx(exact_12).epsilon(1e-10));

  const std::vector<ccm::ClassSample> none;
  CHECK_THROWS_AS(ccm::merge_samples(none), ccm::DataError);
}

TEST_CASE("degree perturbation study behaves like the protocol") {
  const std::vector<double> deltas{0.0, -0.1, 0.1, -0.2, 0.2};
  const auto report =
      ccm::degree_wphi_study(10, 1000.0, 3.0, deltas, harvest_cfg(5000, 50, 10000, 13));

  REQUIRE(report.rows.size() == 5);
  CHECK(report.study == "degree");
  // One chain per law (baseline + 5 deltas), merged: 6 x 10000 draws.
  CHECK(report.draws == 60000);
  CHECK(report.unique_classes > 1000);

  const auto& zero = report.rows[0];
  CHECK(zero.change_percent == 0.0);
  CHECK(zero.w_ratio == 1.0);  // identical law, exact cancellation
  CHECK(zero.abs_change == 0.0);

  const double dev_m10 = report.rows[1].abs_change;
  const double dev_p10 = report.rows[2].abs_change;
  const double dev_m20 = report.rows[3].abs_change;
  const double dev_p20 = report.rows[4].abs_change;

  // Deviations grow with the size of the perturbation (up to noise).
  CHECK(dev_m10 <= dev_m20 + 0.005);
  CHECK(dev_p10 <= dev_p20 + 0.005);

  // A 20% mean change moves the normalizing mass only modestly.
  CHECK(dev_m20 < 0.15);
  CHECK(dev_p20 < 0.15);
}

TEST_CASE("mixing perturbation study stays within the stability bound") {
  const auto labels = ccm::NodeClassification::blockwise(std::vector<int>{25, 25});
  const std::vector<double> alpha{1.0 / 3, 1.0 / 3, 1.0 / 3};
  const std::vector<double> deltas{0.0, -0.1, 0.1, -0.2, 0.2};
  const auto report = ccm::mixing_wphi_study(labels, 50.0, alpha, deltas,
                                             harvest_cfg(100000, 100, 15000, 17));

  REQUIRE(report.rows.size() == 5);
  CHECK(report.study == "mixing");
  CHECK(report.draws == 90000);
  CHECK(report.rows[0].w_ratio == 1.0);
  CHECK(report.rows[0].abs_change == 0.0);
  CHECK(report.unique_classes > 5000);

  // Even at reduced chain length a 20% lambda change moves the estimated
  // normalizing mass by well under ten percent.
  for (std::size_t i = 1; i < report.rows.size(); ++i)
    CHECK(report.rows[i].abs_change < 0.10);
  CHECK(report.rows[1].abs_change <= report.rows[3].abs_change + 0.005);
  CHECK(report.rows[2].abs_change <= report.rows[4].abs_change + 0.005);
}

TEST_CASE("study report CSV round-trips its rows") {
  namespace fs = std::filesystem;
  fs::create_directories("wphi_tmp");

  ccm::StudyReport report;
  report.study = "degree";
  report.unique_classes = 3;
  report.draws = 10;
  report.rows = {{0.0, 1.0, 0.0}, {10.0, 0.97, 0.03}, {-20.0, 1.0625, 0.0625}};
  const std::string path = "wphi_tmp/study.csv";
  ccm::write_study_csv(report, path);

  const auto text = read_file(path);
  std::vector<std::string> lines;
  {
    std::string line;
    std::istringstream in(text);
    while (std::getline(in, line)) lines.push_back(line);
  }
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "change_percent,w_ratio,abs_change");
  const auto row1 = ccm::split_csv_line(lines[1]);
  CHECK(row1 == std::vector<std::string>{"0", "1", "0"});
  const auto row2 = ccm::split_csv_line(lines[2]);
  CHECK(row2[0] == ccm::format_double(10.0));
  CHECK(row2[1] == ccm::format_double(0.97));
  CHECK(row2[2] == ccm::format_double(0.03));
}

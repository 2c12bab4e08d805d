#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "ccm/graph_io.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ccm_io_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

} // namespace

TEST_CASE("edge list round-trip") {
  TempDir td;
  ccm::Network g(6);
  g.add_edge(4, 1);
  g.add_edge(0, 5);
  g.add_edge(2, 3);
  ccm::write_edge_list(g, td.file("g.edges"));

  const auto edges = ccm::read_edge_list(td.file("g.edges"));
  const auto h = ccm::network_from_edges(6, edges);
  REQUIRE(h == g);
}

TEST_CASE("edge list accepts comments and reports bad lines") {
  TempDir td;
  write_text(td.file("ok.edges"), "# comment\n0 1\n\n2 3\n");
  const auto edges = ccm::read_edge_list(td.file("ok.edges"));
  REQUIRE(edges.size() == 2);
  REQUIRE(edges[0] == std::make_pair(0, 1));

  write_text(td.file("bad.edges"), "0 1\nx y\n");
  REQUIRE_THROWS_AS(ccm::read_edge_list(td.file("bad.edges")), ccm::DataError);
  REQUIRE_THROWS_AS(ccm::read_edge_list(td.file("missing.edges")), ccm::DataError);

  write_text(td.file("neg.edges"), "0 -1\n");
  REQUIRE_THROWS_AS(ccm::read_edge_list(td.file("neg.edges")), ccm::DataError);

  write_text(td.file("loop.edges"), "1 1\n");
  REQUIRE_THROWS_AS(ccm::network_from_edges(3, ccm::read_edge_list(td.file("loop.edges"))),
                    ccm::DataError);
  write_text(td.file("dup.edges"), "0 1\n1 0\n");
  REQUIRE_THROWS_AS(ccm::network_from_edges(3, ccm::read_edge_list(td.file("dup.edges"))),
                    ccm::DataError);
}

TEST_CASE("mask round-trip and validation") {
  TempDir td;
  const auto mask = ccm::ObservationMask::from_sampled_ids(7, std::vector<int>{6, 0, 3});
  ccm::write_mask(mask, td.file("m.mask"));
  const auto back = ccm::read_mask(td.file("m.mask"), 7);
  REQUIRE(back.sampled_ids() == std::vector<int>({0, 3, 6}));

  write_text(td.file("bad.mask"), "0\n9\n");
  REQUIRE_THROWS_AS(ccm::read_mask(td.file("bad.mask"), 7), ccm::DataError);
}

TEST_CASE("label round-trip and validation") {
  TempDir td;
  const auto c = ccm::NodeClassification(3, std::vector<int>{2, 0, 1, 1});
  ccm::write_labels(c, td.file("c.csv"));
  const auto back = ccm::read_labels(td.file("c.csv"), 4);
  REQUIRE(back.q() == 3);
  REQUIRE(back.labels() == c.labels());

  write_text(td.file("dup.csv"), "node,label\n0,1\n0,2\n1,0\n");
  REQUIRE_THROWS_AS(ccm::read_labels(td.file("dup.csv"), 2), ccm::DataError);
  write_text(td.file("gap.csv"), "node,label\n0,1\n");
  REQUIRE_THROWS_AS(ccm::read_labels(td.file("gap.csv"), 2), ccm::DataError);
  write_text(td.file("range.csv"), "node,label\n0,0\n5,1\n");
  REQUIRE_THROWS_AS(ccm::read_labels(td.file("range.csv"), 2), ccm::DataError);
}

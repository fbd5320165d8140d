#include "gem/index.hpp"

#include "gem/errors.hpp"

#include "doctest.h"
#include "support/oracles.hpp"

#include <fstream>
#include <random>

using namespace gem;

namespace {

Ad make_ad(const std::string& id, const std::string& name, const std::string& desc,
           const std::string& topic = "travel") {
  Ad ad;
  ad.id = id;
  ad.name = name;
  ad.description = desc;
  ad.url = "https://" + id + ".example.com";
  ad.topic = topic;
  return ad;
}

AdDatabase small_db() {
  AdDatabase db;
  db.source_label = "unit";
  db.ads = {make_ad("a1", "Alpha Maps", "city navigation maps"),
            make_ad("a2", "Bravo Bikes", "rental bikes downtown"),
            make_ad("a3", "Charlie Cafes", "coffee shop guide")};
  return db;
}

Gateway stub_gateway(std::uint64_t seed = 0) {
  return Gateway(std::make_shared<StubBackend>(StubConfig{.seed = seed}));
}

}  // namespace

TEST_CASE("serialize_ad renders column name: value lines") {
  Ad ad;
  ad.id = "x";
  ad.name = "X";
  ad.description = "Y";
  ad.url = "https://x";
  ad.topic = "T";
  CHECK(serialize_ad(ad) == "name: X\ndescription: Y\nurl: https://x\ntopic: T");
}

TEST_CASE("serialize_ad omits absent optional fields") {
  Ad ad = make_ad("a1", "Alpha", "desc");
  CHECK(serialize_ad(ad).find("subtopic:") == std::string::npos);
  ad.subtopic = "sub";
  CHECK(serialize_ad(ad).find("\nsubtopic: sub") != std::string::npos);
}

TEST_CASE("serialize_ad golden fixture") {
  Ad ad = make_ad("a9", "Harbor Light Tours", "guided walking tours of historic harbor districts");
  ad.subtopic = "walking tours";
  ad.bid_price = 2.5;
  CHECK(serialize_ad(ad) ==
        "name: Harbor Light Tours\n"
        "description: guided walking tours of historic harbor districts\n"
        "url: https://a9.example.com\n"
        "topic: travel\n"
        "subtopic: walking tours\n"
        "bid_price: 2.5");
}

TEST_CASE("cosine identities") {
  Vec v{0.6, 0.8};
  CHECK(cosine(v, v) == doctest::Approx(1.0));
  Vec neg{-0.6, -0.8};
  CHECK(cosine(v, neg) == doctest::Approx(-1.0));
  CHECK(cosine(Vec{1, 0}, Vec{0, 1}) == doctest::Approx(0.0));
}

TEST_CASE("cosine errors") {
  CHECK_THROWS_AS(cosine(Vec{1, 0}, Vec{1, 0, 0}), PreconditionError);
  CHECK_THROWS_AS(cosine(Vec{0, 0}, Vec{1, 0}), PreconditionError);
}

TEST_CASE("cosine symmetry property") {
  std::mt19937 rng(3);
  for (int i = 0; i < 100; ++i) {
    Vec u = test::random_vector(rng, 8);
    Vec v = test::random_vector(rng, 8);
    CHECK(cosine(u, v) == doctest::Approx(cosine(v, u)).epsilon(1e-12));
    CHECK(cosine(u, v) <= 1.0);
    CHECK(cosine(u, v) >= -1.0);
  }
}

TEST_CASE("build_index embeds one unit vector per ad") {
  auto gateway = stub_gateway();
  auto index = build_index(small_db(), gateway, "embed-model");
  REQUIRE(index.vectors.size() == 3);
  for (const auto& v : index.vectors) {
    CHECK(vec_norm(v) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(static_cast<int>(v.size()) == index.dimension);
  }
}

TEST_CASE("identical serialized ads get identical vectors") {
  AdDatabase db;
  db.source_label = "unit";
  db.ads = {make_ad("a1", "Same Name", "same words"),
            make_ad("a2", "Same Name", "same words")};
  // ids differ but serialized text differs only via url; force equality
  db.ads[1].url = db.ads[0].url = "https://same.example.com";
  auto gateway = stub_gateway();
  auto index = build_index(db, gateway, "embed-model");
  CHECK(index.vectors[0] == index.vectors[1]);
}

TEST_CASE("index persists and reloads without re-embedding") {
  auto dir = std::filesystem::temp_directory_path() / "gem-index-test";
  std::filesystem::remove_all(dir);
  auto backend = std::make_shared<StubBackend>();
  GatewayConfig cfg;
  cfg.cache_enabled = false;  // isolate the index-level persistence
  Gateway gateway(backend, cfg);

  auto first = build_index(small_db(), gateway, "embed-model", dir);
  long calls_after_build = gateway.backend_calls();
  auto second = build_index(small_db(), gateway, "embed-model", dir);
  CHECK(gateway.backend_calls() == calls_after_build);  // zero embedding calls
  CHECK(second.vectors == first.vectors);
  CHECK(second.dimension == first.dimension);
  std::filesystem::remove_all(dir);
}

TEST_CASE("corrupt index cache signals staleness") {
  auto dir = std::filesystem::temp_directory_path() / "gem-index-stale";
  std::filesystem::remove_all(dir);
  auto gateway = stub_gateway();
  build_index(small_db(), gateway, "embed-model", dir);

  std::filesystem::path file;
  for (const auto& e : std::filesystem::directory_iterator(dir)) file = e.path();
  REQUIRE(!file.empty());

  SUBCASE("row count mismatch") {
    // drop the last row
    std::ifstream in(file);
    std::string line, kept;
    int rows = 0;
    while (std::getline(in, line)) {
      if (++rows <= 2) kept += line + "\n";
    }
    in.close();
    std::ofstream(file, std::ios::trunc) << kept;
    auto fresh = stub_gateway();
    CHECK_THROWS_WITH_AS(build_index(small_db(), fresh, "embed-model", dir),
                         doctest::Contains("stale index cache"), DataError);
  }
  SUBCASE("dimension mismatch") {
    std::ifstream in(file);
    std::string line, rewritten;
    int row = 0;
    while (std::getline(in, line)) {
      if (++row == 2) {
        auto j = nlohmann::json::parse(line);
        j["vector"] = Vec{1.0, 0.0};  // wrong dimension
        line = j.dump();
      }
      rewritten += line + "\n";
    }
    in.close();
    std::ofstream(file, std::ios::trunc) << rewritten;
    auto fresh = stub_gateway();
    CHECK_THROWS_WITH_AS(build_index(small_db(), fresh, "embed-model", dir),
                         doctest::Contains("dimension mismatch"), DataError);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("build_index rejects empty and invalid databases") {
  auto gateway = stub_gateway();
  AdDatabase empty;
  empty.source_label = "unit";
  CHECK_THROWS_AS(build_index(empty, gateway, "m"), PreconditionError);
  AdDatabase dup = small_db();
  dup.ads.push_back(dup.ads[0]);
  CHECK_THROWS_AS(build_index(dup, gateway, "m"), DataError);
}

TEST_CASE("self-retrieval ranks the matching ad first") {
  auto gateway = stub_gateway();
  auto db = small_db();
  auto index = build_index(db, gateway, "embed-model");
  auto result = retrieve_top_t(index, serialize_ad(db.ads[1]), 1,
                               RetrievalBasis::response, gateway);
  REQUIRE(result.ranked.size() == 1);
  CHECK(result.ranked[0].first == "a2");
}

TEST_CASE("t >= database size returns all ads sorted") {
  auto gateway = stub_gateway();
  auto index = build_index(small_db(), gateway, "embed-model");
  auto result = retrieve_top_t(index, "coffee shops near me", 10,
                               RetrievalBasis::prompt, gateway);
  CHECK(result.ranked.size() == 3);
  for (std::size_t i = 1; i < result.ranked.size(); ++i) {
    CHECK(result.ranked[i - 1].second >= result.ranked[i].second);
  }
}

TEST_CASE("retrieval equals brute force over random stub databases") {
  std::mt19937 rng(14);
  const std::vector<std::string> vocab = {"river",  "mountain", "coffee", "cycle", "atlas",
                                          "harbor", "garden",   "stone",  "cloud", "meadow"};
  for (int iter = 0; iter < 30; ++iter) {
    AdDatabase db;
    db.source_label = "prop";
    std::size_t n = 2 + rng() % 8;
    for (std::size_t i = 0; i < n; ++i) {
      std::string word1 = vocab[rng() % vocab.size()];
      std::string word2 = vocab[rng() % vocab.size()];
      db.ads.push_back(make_ad("ad-" + std::to_string(i), word1 + " " + word2,
                               word2 + " services for " + word1));
    }
    auto gateway = stub_gateway(iter);
    auto index = build_index(db, gateway, "embed-model");
    std::string basis = vocab[rng() % vocab.size()] + " " + vocab[rng() % vocab.size()];
    int t = 1 + static_cast<int>(rng() % 4);
    auto got = retrieve_top_t(index, basis, t, RetrievalBasis::response, gateway);

    // brute force with the test-local cosine and the stated tie rule
    Vec q = gateway.embed_batch({basis}, "embed-model").vectors[0];
    std::vector<std::pair<std::string, double>> all;
    for (std::size_t i = 0; i < n; ++i) {
      all.emplace_back(db.ads[i].id, test::oracle_cosine(q, index.vectors[i]));
    }
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    all.resize(std::min<std::size_t>(all.size(), static_cast<std::size_t>(t)));
    REQUIRE(got.ranked.size() == all.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
      CHECK(got.ranked[i].first == all[i].first);
      CHECK(got.ranked[i].second == doctest::Approx(all[i].second).epsilon(1e-12));
    }
  }
}

TEST_CASE("retrieval preconditions") {
  auto gateway = stub_gateway();
  auto index = build_index(small_db(), gateway, "embed-model");
  CHECK_THROWS_AS(retrieve_top_t(index, "", 3, RetrievalBasis::prompt, gateway),
                  PreconditionError);
  CHECK_THROWS_AS(retrieve_top_t(index, "x", 0, RetrievalBasis::prompt, gateway),
                  PreconditionError);
}

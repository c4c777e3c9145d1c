#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "gbx/error.hpp"
#include "gbx/rng.hpp"
#include "gbx/tensor_io.hpp"

using namespace gbx;

namespace {

std::string temp_base(const std::string& tag) {
    return (std::filesystem::temp_directory_path() / ("gbx_io_" + tag)).string();
}

Manifest minimal_manifest(std::size_t n, std::size_t M) {
    Manifest m;
    for (std::size_t i = 0; i < n; ++i) m.model_ids.push_back("model-" + std::to_string(i));
    for (std::size_t q = 0; q < M; ++q) m.query_ids.push_back("query-" + std::to_string(q));
    m.embedding_dim = 2;
    m.provenance = "unit test";
    return m;
}

}  // namespace

TEST_CASE("gbx file layout is byte-exact") {
    ResponseTensor t;
    t.n_models = 1;
    t.n_queries = 1;
    t.replicates = 1;
    t.dim = 2;
    t.data = {0.5, -0.25};
    const std::string base = temp_base("layout");
    write_tensor(base, t, minimal_manifest(1, 1));

    std::ifstream in(base + ".gbx", std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    // magic + version u16 + rank u8 + 4 dims u64 + 2 float32 payload
    CHECK(bytes.size() == 4 + 2 + 1 + 4 * 8 + 2 * 4);
    CHECK(bytes.substr(0, 4) == "GBX1");
    CHECK(static_cast<unsigned char>(bytes[4]) == 1);  // version, little-endian
    CHECK(static_cast<unsigned char>(bytes[5]) == 0);
    CHECK(static_cast<unsigned char>(bytes[6]) == 4);  // rank
    // first dim (n_models = 1) as little-endian u64
    CHECK(static_cast<unsigned char>(bytes[7]) == 1);
    for (int b = 8; b < 15; ++b) CHECK(static_cast<unsigned char>(bytes[b]) == 0);
}

TEST_CASE("response tensor round-trips bit-exactly") {
    ResponseTensor t;
    t.n_models = 2;
    t.n_queries = 3;
    t.replicates = 2;
    t.dim = 4;
    Rng rng(11);
    t.data.resize(t.size());
    for (auto& x : t.data) x = static_cast<double>(static_cast<float>(rng.normal()));

    const std::string base = temp_base("roundtrip");
    write_tensor(base, t, minimal_manifest(2, 3));
    auto [loaded, manifest] = read_tensor(base);

    REQUIRE(std::holds_alternative<ResponseTensor>(loaded));
    const auto& back = std::get<ResponseTensor>(loaded);
    CHECK(back.n_models == t.n_models);
    CHECK(back.replicates == t.replicates);
    CHECK(back.data == t.data);
    CHECK(manifest.model_ids.size() == 2);
    CHECK(manifest.provenance == "unit test");
}

TEST_CASE("round-trip identity over random shapes") {
    Rng rng(202);
    for (int trial = 0; trial < 20; ++trial) {
        ResponseTensor t;
        t.n_models = 1 + rng.below(4);
        t.n_queries = 1 + rng.below(4);
        t.replicates = 1 + rng.below(3);
        t.dim = 1 + rng.below(5);
        t.data.resize(t.size());
        for (auto& x : t.data) x = static_cast<double>(static_cast<float>(rng.normal() * 10.0));
        const std::string base = temp_base("prop" + std::to_string(trial));
        write_tensor(base, t, minimal_manifest(t.n_models, t.n_queries));
        auto [loaded, manifest] = read_tensor(base);
        CHECK(std::get<ResponseTensor>(loaded).data == t.data);
    }
}

TEST_CASE("per-query distances round-trip and validate") {
    PerQueryDistances d;
    d.n_models = 3;
    d.n_queries = 2;
    d.data.assign(d.size(), 0.0);
    d.at(0, 0, 1) = d.at(0, 1, 0) = 4.0f;
    d.at(1, 1, 2) = d.at(1, 2, 1) = 2.5f;
    const std::string base = temp_base("pqd");
    write_tensor(base, d, minimal_manifest(3, 2));
    auto [loaded, manifest] = read_tensor(base);
    REQUIRE(std::holds_alternative<PerQueryDistances>(loaded));
    CHECK(std::get<PerQueryDistances>(loaded).data == d.data);
}

TEST_CASE("invariant violations are named") {
    ResponseTensor t;
    t.n_models = 1;
    t.n_queries = 1;
    t.replicates = 1;
    t.dim = 2;
    t.data = {0.5, std::nan("")};
    CHECK_THROWS_WITH_AS(write_tensor(temp_base("nan"), t, minimal_manifest(1, 1)),
                         doctest::Contains("finite"), validation_error);

    PerQueryDistances d;
    d.n_models = 2;
    d.n_queries = 1;
    d.data = {0.0, 1.0, 2.0, 0.0};  // asymmetric
    CHECK_THROWS_AS(write_tensor(temp_base("asym"), d, minimal_manifest(2, 1)), validation_error);
}

TEST_CASE("manifest dimension mismatch is rejected") {
    ResponseTensor t;
    t.n_models = 2;
    t.n_queries = 1;
    t.replicates = 1;
    t.dim = 1;
    t.data = {1.0, 2.0};
    CHECK_THROWS_AS(write_tensor(temp_base("mismatch"), t, minimal_manifest(3, 1)), validation_error);
}

TEST_CASE("corrupt files raise format errors, not crashes") {
    ResponseTensor t;
    t.n_models = 1;
    t.n_queries = 1;
    t.replicates = 1;
    t.dim = 2;
    t.data = {1.0, 2.0};
    const std::string base = temp_base("corrupt");
    write_tensor(base, t, minimal_manifest(1, 1));

    SUBCASE("truncated payload") {
        std::ifstream in(base + ".gbx", std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        in.close();
        std::ofstream out(base + ".gbx", std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 3));
        out.close();
        CHECK_THROWS_AS(read_tensor(base), format_error);
    }
    SUBCASE("bad magic") {
        std::ofstream out(base + ".gbx", std::ios::binary | std::ios::trunc);
        out << "NOPE" << std::string(40, '\0');
        out.close();
        CHECK_THROWS_AS(read_tensor(base), format_error);
    }
    SUBCASE("missing file") { CHECK_THROWS_AS(read_tensor(base + "_nowhere"), io_error); }
}

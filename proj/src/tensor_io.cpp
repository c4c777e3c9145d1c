#include "gbx/tensor_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "gbx/error.hpp"

namespace gbx {

namespace {

constexpr std::array<char, 4> kMagic = {'G', 'B', 'X', '1'};
constexpr std::uint16_t kVersion = 1;

// Explicit little-endian packing so files parse identically everywhere.
void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

void put_f32(std::string& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
}

class Reader {
public:
    explicit Reader(const std::string& bytes) : bytes_(bytes) {}

    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(bytes_[pos_++]);
    }
    std::uint16_t u16() {
        need(2);
        std::uint16_t v = static_cast<std::uint8_t>(bytes_[pos_]) |
                          (static_cast<std::uint16_t>(static_cast<std::uint8_t>(bytes_[pos_ + 1])) << 8);
        pos_ += 2;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int b = 0; b < 8; ++b)
            v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(bytes_[pos_ + b])) << (8 * b);
        pos_ += 8;
        return v;
    }
    float f32() {
        need(4);
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b)
            bits |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes_[pos_ + b])) << (8 * b);
        pos_ += 4;
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
    bool exhausted() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) const {
        if (pos_ + n > bytes_.size()) throw format_error("truncated .gbx file");
    }
    const std::string& bytes_;
    std::size_t pos_ = 0;
};

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open for writing: " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw io_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open: " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw io_error("read failed: " + path);
    return bytes;
}

std::string encode(const std::vector<std::uint64_t>& dims, const std::vector<double>& data) {
    std::string out;
    out.reserve(4 + 2 + 1 + 8 * dims.size() + 4 * data.size());
    out.append(kMagic.data(), kMagic.size());
    put_u16(out, kVersion);
    out.push_back(static_cast<char>(dims.size()));
    for (auto d : dims) put_u64(out, d);
    for (double x : data) put_f32(out, static_cast<float>(x));
    return out;
}

void write_manifest(const std::string& path, const Manifest& m) {
    std::string text = manifest_to_json(m);
    text.push_back('\n');
    write_file(path, text);
}

}  // namespace

std::string manifest_to_json(const Manifest& m) {
    nlohmann::json j;
    j["model_ids"] = m.model_ids;
    if (m.model_labels) j["model_labels"] = *m.model_labels;
    j["query_ids"] = m.query_ids;
    if (m.oracle_query_labels) j["oracle_query_labels"] = *m.oracle_query_labels;
    j["embedding_dim"] = m.embedding_dim;
    j["provenance"] = m.provenance;
    if (m.output_cardinality) j["output_cardinality"] = *m.output_cardinality;
    return j.dump(2);
}

Manifest manifest_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw format_error(std::string("manifest is not valid JSON: ") + e.what());
    }
    Manifest m;
    try {
        m.model_ids = j.value("model_ids", std::vector<std::string>{});
        if (j.contains("model_labels") && !j["model_labels"].is_null())
            m.model_labels = j["model_labels"].get<std::vector<int>>();
        m.query_ids = j.value("query_ids", std::vector<std::string>{});
        if (j.contains("oracle_query_labels") && !j["oracle_query_labels"].is_null())
            m.oracle_query_labels = j["oracle_query_labels"].get<std::vector<std::string>>();
        m.embedding_dim = j.value("embedding_dim", std::size_t{0});
        m.provenance = j.value("provenance", std::string{});
        if (j.contains("output_cardinality") && !j["output_cardinality"].is_null())
            m.output_cardinality = j["output_cardinality"].get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw format_error(std::string("manifest field has wrong type: ") + e.what());
    }
    return m;
}

void write_tensor(const std::string& path, const ResponseTensor& tensor, const Manifest& manifest) {
    tensor.validate();
    manifest.validate_against(tensor.n_models, tensor.n_queries);
    write_file(path + ".gbx",
               encode({tensor.n_models, tensor.n_queries, tensor.replicates, tensor.dim}, tensor.data));
    write_manifest(path + ".json", manifest);
}

void write_tensor(const std::string& path, const PerQueryDistances& tensor, const Manifest& manifest) {
    tensor.validate();
    manifest.validate_against(tensor.n_models, tensor.n_queries);
    write_file(path + ".gbx", encode({tensor.n_queries, tensor.n_models, tensor.n_models}, tensor.data));
    write_manifest(path + ".json", manifest);
}

std::pair<AnyTensor, Manifest> read_tensor(const std::string& path) {
    const std::string bytes = read_file(path + ".gbx");
    Reader r(bytes);
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic.data(), 4) != 0)
        throw format_error("bad magic: not a .gbx file");
    r.u8();
    r.u8();
    r.u8();
    r.u8();
    const std::uint16_t version = r.u16();
    if (version != kVersion) throw format_error("unsupported .gbx format version");
    const std::uint8_t rank = r.u8();
    if (rank != 3 && rank != 4) throw format_error("unsupported .gbx tensor rank");
    std::vector<std::uint64_t> dims(rank);
    std::size_t count = 1;
    for (auto& d : dims) {
        d = r.u64();
        count *= static_cast<std::size_t>(d);
    }
    std::vector<double> data(count);
    for (auto& x : data) x = static_cast<double>(r.f32());
    if (!r.exhausted()) throw format_error("trailing bytes after .gbx payload");

    Manifest manifest = manifest_from_json(read_file(path + ".json"));

    if (rank == 4) {
        ResponseTensor t;
        t.n_models = dims[0];
        t.n_queries = dims[1];
        t.replicates = dims[2];
        t.dim = dims[3];
        t.data = std::move(data);
        t.validate();
        manifest.validate_against(t.n_models, t.n_queries);
        return {AnyTensor{std::move(t)}, std::move(manifest)};
    }
    PerQueryDistances t;
    t.n_queries = dims[0];
    t.n_models = dims[1];
    if (dims[1] != dims[2]) throw format_error("per-query distance slices must be square");
    t.data = std::move(data);
    t.validate();
    manifest.validate_against(t.n_models, t.n_queries);
    return {AnyTensor{std::move(t)}, std::move(manifest)};
}

}  // namespace gbx

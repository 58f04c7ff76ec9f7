#include "ctrboost/model_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <utility>
#include <vector>

#include "ctrboost/error.hpp"

namespace ctrboost {

uint64_t fnv1a64(std::string_view bytes) {
    uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

namespace {

class Writer {
public:
    void u8(uint8_t v) { out_.push_back(static_cast<char>(v)); }
    void u32(uint32_t v) { put_le(v, 4); }
    void i32(int32_t v) { put_le(static_cast<uint32_t>(v), 4); }
    void u64(uint64_t v) { put_le(v, 8); }
    void f64(double v) { u64(std::bit_cast<uint64_t>(v)); }
    void str(std::string_view s) {
        u32(static_cast<uint32_t>(s.size()));
        out_.append(s);
    }
    void f64s(const std::vector<double>& v) {
        u64(v.size());
        for (double x : v) f64(x);
    }
    void u32s(const std::vector<uint32_t>& v) {
        u64(v.size());
        for (uint32_t x : v) u32(x);
    }
    void strings(const Dictionary& v) {
        u64(v.size());
        for (const auto& s : v) str(s);
    }
    std::string& bytes() { return out_; }

private:
    void put_le(uint64_t v, int n) {
        for (int i = 0; i < n; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    std::string out_;
};

class Reader {
public:
    Reader(std::string_view bytes, std::string section) : in_(bytes), section_(std::move(section)) {}

    uint8_t u8() { return static_cast<uint8_t>(take(1)[0]); }
    uint32_t u32() { return static_cast<uint32_t>(get_le(4)); }
    int32_t i32() { return static_cast<int32_t>(u32()); }
    uint64_t u64() { return get_le(8); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        const uint32_t n = u32();
        return std::string(take(n));
    }
    std::vector<double> f64s() {
        const uint64_t n = count(8);
        std::vector<double> v(n);
        for (auto& x : v) x = f64();
        return v;
    }
    std::vector<uint32_t> u32s() {
        const uint64_t n = count(4);
        std::vector<uint32_t> v(n);
        for (auto& x : v) x = u32();
        return v;
    }
    Dictionary strings() {
        const uint64_t n = count(4);
        Dictionary v(n);
        for (auto& s : v) s = str();
        return v;
    }
    void expect_end() const {
        if (pos_ != in_.size()) malformed("trailing bytes");
    }
    [[noreturn]] void malformed(const std::string& what) const {
        fail(ErrorCode::parse, "model file section '" + section_ + "' malformed: " + what);
    }

private:
    uint64_t count(std::size_t min_item_bytes) {
        const uint64_t n = u64();
        if (n > (in_.size() - pos_) / min_item_bytes) malformed("element count exceeds section size");
        return n;
    }
    std::string_view take(std::size_t n) {
        if (n > in_.size() - pos_) malformed("unexpected end of section");
        const auto out = in_.substr(pos_, n);
        pos_ += n;
        return out;
    }
    uint64_t get_le(int n) {
        const auto b = take(static_cast<std::size_t>(n));
        uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= static_cast<uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
        return v;
    }

    std::string_view in_;
    std::size_t pos_ = 0;
    std::string section_;
};

// Section payloads -----------------------------------------------------------

std::string write_config(const GBDTConfig& c) {
    Writer w;
    w.u32(c.n_trees);
    w.f64(c.learning_rate);
    w.u32(c.max_depth);
    w.f64(c.lambda);
    w.f64(c.gamma);
    w.f64(c.min_child_weight);
    w.u32(c.max_bins);
    w.u32(c.early_stopping_rounds);
    w.u8(static_cast<uint8_t>(c.cat_mode));
    w.u64(c.seed);
    w.u32(c.n_threads);
    return std::move(w.bytes());
}

GBDTConfig read_config(Reader& r) {
    GBDTConfig c;
    c.n_trees = r.u32();
    c.learning_rate = r.f64();
    c.max_depth = r.u32();
    c.lambda = r.f64();
    c.gamma = r.f64();
    c.min_child_weight = r.f64();
    c.max_bins = r.u32();
    c.early_stopping_rounds = r.u32();
    const uint8_t mode = r.u8();
    if (mode > 1) r.malformed("unknown categorical mode");
    c.cat_mode = static_cast<CategoricalMode>(mode);
    c.seed = r.u64();
    c.n_threads = r.u32();
    r.expect_end();
    return c;
}

std::string write_features(const std::vector<ModelFeature>& features) {
    Writer w;
    w.u32(static_cast<uint32_t>(features.size()));
    for (const auto& f : features) {
        w.str(f.name);
        w.u8(static_cast<uint8_t>(f.type));
        if (f.type == FeatureType::numeric) {
            w.f64s(f.bins.upper_bounds);
        } else {
            w.strings(*f.dictionary);
        }
    }
    return std::move(w.bytes());
}

std::vector<ModelFeature> read_features(Reader& r) {
    const uint32_t n = r.u32();
    std::vector<ModelFeature> features;
    for (uint32_t i = 0; i < n; ++i) {
        ModelFeature f;
        f.name = r.str();
        const uint8_t type = r.u8();
        if (type > 1) r.malformed("unknown feature type");
        f.type = static_cast<FeatureType>(type);
        if (f.type == FeatureType::numeric) {
            f.bins.upper_bounds = r.f64s();
        } else {
            f.dictionary = std::make_shared<const Dictionary>(r.strings());
        }
        features.push_back(std::move(f));
    }
    r.expect_end();
    return features;
}

std::string write_encoder(const std::optional<FittedEncoder>& enc) {
    Writer w;
    w.u8(enc ? 1 : 0);
    if (enc) {
        const auto& s = enc->spec();
        w.u8(static_cast<uint8_t>(s.mode));
        w.f64(s.smoothing);
        w.u32(s.k_folds);
        w.u32(s.n_permutations);
        w.u64(s.seed);
        w.u8(s.prior ? 1 : 0);
        w.f64(s.prior.value_or(0.0));
        w.f64(enc->prior());
        w.u32(static_cast<uint32_t>(enc->columns().size()));
        for (const auto& col : enc->columns()) {
            w.str(col.name);
            w.strings(*col.dictionary);
            w.u64(col.stats.size());
            for (const auto& st : col.stats) {
                w.f64(st.target_sum);
                w.u64(st.count);
            }
        }
    }
    return std::move(w.bytes());
}

std::optional<FittedEncoder> read_encoder(Reader& r) {
    const uint8_t present = r.u8();
    if (present == 0) {
        r.expect_end();
        return std::nullopt;
    }
    EncoderSpec s;
    const uint8_t mode = r.u8();
    if (mode > static_cast<uint8_t>(EncoderMode::native_passthrough)) r.malformed("unknown encoder mode");
    s.mode = static_cast<EncoderMode>(mode);
    s.smoothing = r.f64();
    s.k_folds = r.u32();
    s.n_permutations = r.u32();
    s.seed = r.u64();
    const bool has_prior = r.u8() != 0;
    const double fixed_prior = r.f64();
    if (has_prior) s.prior = fixed_prior;
    const double prior = r.f64();
    const uint32_t n_cols = r.u32();
    std::vector<EncodedColumn> columns;
    for (uint32_t c = 0; c < n_cols; ++c) {
        EncodedColumn col;
        col.name = r.str();
        col.dictionary = std::make_shared<const Dictionary>(r.strings());
        const uint64_t n_stats = r.u64();
        if (n_stats != col.dictionary->size()) r.malformed("statistics do not match dictionary");
        col.stats.resize(n_stats);
        for (auto& st : col.stats) {
            st.target_sum = r.f64();
            st.count = r.u64();
        }
        columns.push_back(std::move(col));
    }
    r.expect_end();
    return FittedEncoder(s, prior, std::move(columns));
}

std::string write_trees(const Model& m) {
    Writer w;
    w.f64(m.base_score);
    w.f64(m.learning_rate);
    w.u32(static_cast<uint32_t>(m.trees.size()));
    for (const auto& tree : m.trees) {
        w.u32(static_cast<uint32_t>(tree.nodes.size()));
        for (const auto& n : tree.nodes) {
            w.i32(n.left);
            w.i32(n.right);
            w.u32(n.feature);
            w.u8(static_cast<uint8_t>(n.kind));
            w.f64(n.threshold);
            w.u8(n.default_left ? 1 : 0);
            w.f64(n.gain);
            w.f64(n.weight);
            w.u32(n.depth);
            w.u32s(n.left_categories);
            w.u32s(n.right_categories);
        }
    }
    return std::move(w.bytes());
}

void read_trees(Reader& r, Model& m) {
    m.base_score = r.f64();
    m.learning_rate = r.f64();
    const uint32_t n_trees = r.u32();
    for (uint32_t t = 0; t < n_trees; ++t) {
        Tree tree;
        const uint32_t n_nodes = r.u32();
        if (n_nodes == 0) r.malformed("empty tree");
        tree.nodes.resize(n_nodes);
        for (auto& n : tree.nodes) {
            n.left = r.i32();
            n.right = r.i32();
            n.feature = r.u32();
            const uint8_t kind = r.u8();
            if (kind > 1) r.malformed("unknown split kind");
            n.kind = static_cast<SplitKind>(kind);
            n.threshold = r.f64();
            n.default_left = r.u8() != 0;
            n.gain = r.f64();
            n.weight = r.f64();
            n.depth = r.u32();
            n.left_categories = r.u32s();
            n.right_categories = r.u32s();
        }
        for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
            const auto& n = tree.nodes[i];
            if (n.is_leaf()) continue;
            // Children always follow their parent, which rules out cycles.
            const auto in_range = [&](int32_t c) {
                return c > static_cast<int32_t>(i) && c < static_cast<int32_t>(n_nodes);
            };
            if (!in_range(n.left) || !in_range(n.right)) r.malformed("child index out of range");
            if (n.feature >= m.features.size()) r.malformed("split feature out of range");
            const bool categorical = m.features[n.feature].type == FeatureType::categorical;
            if (categorical != (n.kind == SplitKind::categorical)) {
                r.malformed("split kind does not match feature type");
            }
        }
        m.trees.push_back(std::move(tree));
    }
    r.expect_end();
}

std::string write_metadata(const TrainingMetadata& meta) {
    Writer w;
    w.u32(meta.iterations_run);
    w.u32(meta.best_iteration);
    w.f64s(meta.train_logloss);
    w.f64s(meta.valid_logloss);
    w.u32(static_cast<uint32_t>(meta.warnings.size()));
    for (const auto& s : meta.warnings) w.str(s);
    return std::move(w.bytes());
}

void read_metadata(Reader& r, TrainingMetadata& meta) {
    meta.iterations_run = r.u32();
    meta.best_iteration = r.u32();
    meta.train_logloss = r.f64s();
    meta.valid_logloss = r.f64s();
    const uint32_t n = r.u32();
    for (uint32_t i = 0; i < n; ++i) meta.warnings.push_back(r.str());
    r.expect_end();
}

constexpr std::size_t kHeaderBytes = 8 + 4 + 4;
constexpr std::size_t kTableEntryBytes = 4 + 4 + 8 + 8;
constexpr std::size_t kChecksumBytes = 8;

uint64_t read_le(std::string_view bytes, std::size_t pos, int n) {
    uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
        v |= static_cast<uint64_t>(static_cast<unsigned char>(bytes[pos + static_cast<std::size_t>(i)]))
             << (8 * i);
    }
    return v;
}

} // namespace

std::string serialize_model(const Model& model) {
    const std::vector<std::pair<ModelSection, std::string>> sections = {
        {ModelSection::config, write_config(model.metadata.config)},
        {ModelSection::features, write_features(model.features)},
        {ModelSection::encoder, write_encoder(model.encoder)},
        {ModelSection::trees, write_trees(model)},
        {ModelSection::metadata, write_metadata(model.metadata)},
    };
    Writer w;
    w.bytes().append(kModelMagic, sizeof(kModelMagic));
    w.u32(kModelFormatVersion);
    w.u32(static_cast<uint32_t>(sections.size()));
    uint64_t offset = kHeaderBytes + kTableEntryBytes * sections.size();
    for (const auto& [id, payload] : sections) {
        w.u32(static_cast<uint32_t>(id));
        w.u32(0);
        w.u64(offset);
        w.u64(payload.size());
        offset += payload.size();
    }
    for (const auto& [id, payload] : sections) w.bytes().append(payload);
    w.u64(fnv1a64(w.bytes()));
    return std::move(w.bytes());
}

Model deserialize_model(std::string_view bytes) {
    // Identity first, so a foreign or newer file is not reported as corrupt.
    const std::size_t magic_len = std::min(bytes.size(), sizeof(kModelMagic));
    if (std::memcmp(bytes.data(), kModelMagic, magic_len) != 0) {
        fail(ErrorCode::parse, "not a ctrboost model file");
    }
    if (bytes.size() >= 12) {
        const auto version = static_cast<uint32_t>(read_le(bytes, 8, 4));
        if (version != kModelFormatVersion) {
            fail(ErrorCode::version, "unsupported model format version " + std::to_string(version) +
                                         " (expected " + std::to_string(kModelFormatVersion) + ")");
        }
    }
    if (bytes.size() < kHeaderBytes + kChecksumBytes) {
        fail(ErrorCode::truncated, "model file truncated: header incomplete");
    }
    const uint32_t n_sections = static_cast<uint32_t>(read_le(bytes, 12, 4));
    const std::size_t table_end = kHeaderBytes + kTableEntryBytes * static_cast<std::size_t>(n_sections);
    if (n_sections > 64) fail(ErrorCode::parse, "model file declares too many sections");
    if (bytes.size() < table_end + kChecksumBytes) {
        fail(ErrorCode::truncated, "model file truncated: section table incomplete");
    }
    uint64_t payload_end = table_end;
    for (uint32_t s = 0; s < n_sections; ++s) {
        const std::size_t e = kHeaderBytes + kTableEntryBytes * s;
        const uint64_t off = read_le(bytes, e + 8, 8);
        const uint64_t len = read_le(bytes, e + 16, 8);
        if (off < table_end || len > UINT64_MAX - off) fail(ErrorCode::parse, "model file section table corrupt");
        payload_end = std::max(payload_end, off + len);
    }
    if (bytes.size() < payload_end + kChecksumBytes) {
        fail(ErrorCode::truncated, "model file truncated: expected at least " +
                                       std::to_string(payload_end + kChecksumBytes) + " bytes, got " +
                                       std::to_string(bytes.size()));
    }
    const std::size_t body = bytes.size() - kChecksumBytes;
    if (fnv1a64(bytes.substr(0, body)) != read_le(bytes, body, 8)) {
        fail(ErrorCode::checksum, "model file checksum mismatch");
    }

    std::map<uint32_t, std::string_view> payloads;
    for (uint32_t s = 0; s < n_sections; ++s) {
        const std::size_t e = kHeaderBytes + kTableEntryBytes * s;
        const auto id = static_cast<uint32_t>(read_le(bytes, e, 4));
        const uint64_t off = read_le(bytes, e + 8, 8);
        const uint64_t len = read_le(bytes, e + 16, 8);
        payloads[id] = bytes.substr(off, len);
    }
    auto section = [&](ModelSection id, const char* name) {
        const auto it = payloads.find(static_cast<uint32_t>(id));
        if (it == payloads.end()) fail(ErrorCode::parse, std::string("model file lacks section '") + name + "'");
        return Reader(it->second, name);
    };

    Model m;
    {
        auto r = section(ModelSection::config, "config");
        m.metadata.config = read_config(r);
    }
    {
        auto r = section(ModelSection::features, "features");
        m.features = read_features(r);
    }
    {
        auto r = section(ModelSection::encoder, "encoder");
        m.encoder = read_encoder(r);
    }
    {
        auto r = section(ModelSection::trees, "trees");
        read_trees(r, m);
    }
    {
        auto r = section(ModelSection::metadata, "metadata");
        read_metadata(r, m.metadata);
    }
    return m;
}

void save_model(const Model& model, const std::filesystem::path& path) {
    const std::string bytes = serialize_model(model);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io, "cannot write '" + path.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::io, "write failed for '" + path.string() + "'");
}

Model load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open '" + path.string() + "'");
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return deserialize_model(bytes);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

} // namespace ctrboost

#include "shapdbm/serialization.hpp"

#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace shapdbm {

namespace {

constexpr char kMagic[4] = {'S', 'D', 'B', 'M'};
constexpr std::uint16_t kVersion = 1;

enum class Kind : std::uint16_t {
    Dataset = 1,
    Shapley = 3,
    Embedding = 4,
    Classifier = 5,
    Inverse = 6,
    DecisionMap = 7,
};

class Writer {
  public:
    explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary) {
        if (!out_) {
            throw IoError("cannot open for writing: " + path.string());
        }
        path_ = path;
    }

    void u8(std::uint8_t v) { raw(&v, 1); }
    void u16(std::uint16_t v) { raw_le(v); }
    void u32(std::uint32_t v) { raw_le(v); }
    void u64(std::uint64_t v) { raw_le(v); }
    void i32(std::int32_t v) { raw_le(static_cast<std::uint32_t>(v)); }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        raw_le(bits);
    }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        raw(s.data(), s.size());
    }
    void matrix(const Matrix& m) {
        u64(static_cast<std::uint64_t>(m.rows()));
        u64(static_cast<std::uint64_t>(m.cols()));
        for (Index i = 0; i < m.rows(); ++i) {
            for (Index j = 0; j < m.cols(); ++j) {
                f64(m(i, j));
            }
        }
    }
    void dvec(const Vector& v) {
        u64(static_cast<std::uint64_t>(v.size()));
        for (Index i = 0; i < v.size(); ++i) {
            f64(v(i));
        }
    }
    void dvec(const std::vector<double>& v) {
        u64(v.size());
        for (double x : v) {
            f64(x);
        }
    }
    void ivec(const std::vector<int>& v) {
        u64(v.size());
        for (int x : v) {
            i32(x);
        }
    }
    void bounds(const Bounds& b) {
        f64(b.xmin);
        f64(b.xmax);
        f64(b.ymin);
        f64(b.ymax);
    }

    void close() {
        out_.flush();
        if (!out_) {
            throw IoError("write failed: " + path_.string());
        }
    }

  private:
    template <typename T>
    void raw_le(T v) {
        std::array<std::uint8_t, sizeof(T)> bytes;
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            bytes[i] = static_cast<std::uint8_t>(v >> (8 * i));
        }
        raw(bytes.data(), bytes.size());
    }
    void raw(const void* data, std::size_t size) {
        out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    }

    std::ofstream out_;
    std::filesystem::path path_;
};

class Reader {
  public:
    explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
        if (!in_) {
            throw IoError("cannot open for reading: " + path.string());
        }
        path_ = path;
    }

    std::uint8_t u8() {
        std::uint8_t v;
        raw(&v, 1);
        return v;
    }
    std::uint16_t u16() { return raw_le<std::uint16_t>(); }
    std::uint32_t u32() { return raw_le<std::uint32_t>(); }
    std::uint64_t u64() { return raw_le<std::uint64_t>(); }
    std::int32_t i32() { return static_cast<std::int32_t>(raw_le<std::uint32_t>()); }
    double f64() {
        const std::uint64_t bits = raw_le<std::uint64_t>();
        double v;
        std::memcpy(&v, &bits, sizeof(v));
        return v;
    }
    std::string str() {
        const std::uint32_t size = u32();
        std::string s(size, '\0');
        raw(s.data(), size);
        return s;
    }
    Matrix matrix() {
        const auto rows = static_cast<Index>(u64());
        const auto cols = static_cast<Index>(u64());
        Matrix m(rows, cols);
        for (Index i = 0; i < rows; ++i) {
            for (Index j = 0; j < cols; ++j) {
                m(i, j) = f64();
            }
        }
        return m;
    }
    Vector dvec() {
        const auto size = static_cast<Index>(u64());
        Vector v(size);
        for (Index i = 0; i < size; ++i) {
            v(i) = f64();
        }
        return v;
    }
    std::vector<double> dvec_std() {
        const auto size = u64();
        std::vector<double> v(size);
        for (auto& x : v) {
            x = f64();
        }
        return v;
    }
    std::vector<int> ivec() {
        const auto size = u64();
        std::vector<int> v(size);
        for (auto& x : v) {
            x = i32();
        }
        return v;
    }
    Bounds bounds() {
        Bounds b;
        b.xmin = f64();
        b.xmax = f64();
        b.ymin = f64();
        b.ymax = f64();
        return b;
    }

    const std::filesystem::path& path() const { return path_; }

  private:
    template <typename T>
    T raw_le() {
        std::array<std::uint8_t, sizeof(T)> bytes;
        raw(bytes.data(), bytes.size());
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            v |= static_cast<T>(bytes[i]) << (8 * i);
        }
        return v;
    }
    void raw(void* data, std::size_t size) {
        in_.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
        if (!in_) {
            throw FormatError("truncated container: " + path_.string());
        }
    }

    std::ifstream in_;
    std::filesystem::path path_;
};

void write_header(Writer& w, Kind kind) {
    w.u8(static_cast<std::uint8_t>(kMagic[0]));
    w.u8(static_cast<std::uint8_t>(kMagic[1]));
    w.u8(static_cast<std::uint8_t>(kMagic[2]));
    w.u8(static_cast<std::uint8_t>(kMagic[3]));
    w.u16(kVersion);
    w.u16(static_cast<std::uint16_t>(kind));
}

void expect_header(Reader& r, Kind kind) {
    char magic[4];
    magic[0] = static_cast<char>(r.u8());
    magic[1] = static_cast<char>(r.u8());
    magic[2] = static_cast<char>(r.u8());
    magic[3] = static_cast<char>(r.u8());
    if (std::memcmp(magic, kMagic, 4) != 0) {
        throw FormatError("bad container magic: " + r.path().string());
    }
    const std::uint16_t version = r.u16();
    if (version != kVersion) {
        throw FormatError("unsupported container version " + std::to_string(version) + ": " +
                          r.path().string());
    }
    const std::uint16_t actual = r.u16();
    if (actual != static_cast<std::uint16_t>(kind)) {
        throw FormatError("container holds kind " + std::to_string(actual) + ", expected " +
                          std::to_string(static_cast<std::uint16_t>(kind)) + ": " +
                          r.path().string());
    }
}

void write_mlp(Writer& w, const Mlp& net) {
    w.ivec(net.shape().widths);
    w.u8(static_cast<std::uint8_t>(net.shape().hidden));
    w.u8(static_cast<std::uint8_t>(net.shape().output));
    for (const auto& layer : net.params()) {
        w.matrix(layer.weights);
        w.dvec(layer.bias);
    }
}

Mlp read_mlp(Reader& r) {
    MlpShape shape;
    shape.widths = r.ivec();
    shape.hidden = static_cast<Activation>(r.u8());
    shape.output = static_cast<OutputKind>(r.u8());
    std::vector<LayerParams> params;
    for (std::size_t l = 0; l + 1 < shape.widths.size(); ++l) {
        LayerParams p;
        p.weights = r.matrix();
        p.bias = r.dvec();
        params.push_back(std::move(p));
    }
    return Mlp(shape, std::move(params));
}

}  // namespace

void save_dataset(const std::filesystem::path& path, const Dataset& data) {
    Writer w(path);
    write_header(w, Kind::Dataset);
    w.i32(data.feature_count);
    w.i32(data.class_count);
    w.matrix(data.features);
    w.ivec(data.labels);
    w.close();
}

Dataset load_dataset(const std::filesystem::path& path) {
    Reader r(path);
    expect_header(r, Kind::Dataset);
    Dataset d;
    d.feature_count = r.i32();
    d.class_count = r.i32();
    d.features = r.matrix();
    d.labels = r.ivec();
    d.validate();
    return d;
}

void save_shapley(const std::filesystem::path& path, const ShapleyMatrix& matrix) {
    Writer w(path);
    write_header(w, Kind::Shapley);
    w.str(matrix.explained_output);
    w.matrix(matrix.values);
    w.dvec(matrix.base_values);
    w.close();
}

ShapleyMatrix load_shapley(const std::filesystem::path& path) {
    Reader r(path);
    expect_header(r, Kind::Shapley);
    ShapleyMatrix m;
    m.explained_output = r.str();
    m.values = r.matrix();
    m.base_values = r.dvec();
    return m;
}

void save_embedding(const std::filesystem::path& path, const Embedding& embedding) {
    Writer w(path);
    write_header(w, Kind::Embedding);
    w.matrix(embedding.coords);
    w.bounds(embedding.bounds);
    w.close();
}

Embedding load_embedding(const std::filesystem::path& path) {
    Reader r(path);
    expect_header(r, Kind::Embedding);
    Embedding e;
    e.coords = r.matrix();
    e.bounds = r.bounds();
    return e;
}

void save_classifier(const std::filesystem::path& path, const NetworkModel& model) {
    Writer w(path);
    write_header(w, Kind::Classifier);
    w.str("classifier");
    write_mlp(w, model.net);
    w.u64(model.seed);
    w.dvec(model.history.epoch_loss);
    w.close();
}

NetworkModel load_classifier(const std::filesystem::path& path) {
    Reader r(path);
    expect_header(r, Kind::Classifier);
    const std::string role = r.str();
    if (role != "classifier") {
        throw FormatError("model role '" + role + "' is not a classifier: " + path.string());
    }
    NetworkModel m;
    m.net = read_mlp(r);
    m.seed = r.u64();
    m.history.epoch_loss = r.dvec_std();
    m.spec.layer_widths = m.net.shape().widths;
    m.spec.hidden = m.net.shape().hidden;
    return m;
}

void save_inverse(const std::filesystem::path& path, const InverseModel& model) {
    Writer w(path);
    write_header(w, Kind::Inverse);
    w.str("inverse");
    write_mlp(w, model.net);
    w.bounds(model.train_bounds);
    w.u64(model.seed);
    w.dvec(model.history.epoch_loss);
    w.close();
}

InverseModel load_inverse(const std::filesystem::path& path) {
    Reader r(path);
    expect_header(r, Kind::Inverse);
    const std::string role = r.str();
    if (role != "inverse") {
        throw FormatError("model role '" + role + "' is not an inverse: " + path.string());
    }
    InverseModel m;
    m.net = read_mlp(r);
    m.train_bounds = r.bounds();
    m.seed = r.u64();
    m.history.epoch_loss = r.dvec_std();
    return m;
}

void save_decision_map(const std::filesystem::path& path, const DecisionMap& map) {
    Writer w(path);
    write_header(w, Kind::DecisionMap);
    w.i32(map.grid.resolution);
    w.i32(map.grid.locations_per_pixel);
    w.bounds(map.grid.bounds);
    w.u64(map.grid.seed);
    w.i32(map.class_count);
    w.ivec(map.labels);
    w.dvec(std::vector<double>(map.confidence.begin(), map.confidence.end()));
    w.close();
}

DecisionMap load_decision_map(const std::filesystem::path& path) {
    Reader r(path);
    expect_header(r, Kind::DecisionMap);
    DecisionMap m;
    m.grid.resolution = r.i32();
    m.grid.locations_per_pixel = r.i32();
    m.grid.bounds = r.bounds();
    m.grid.seed = r.u64();
    m.class_count = r.i32();
    m.labels = r.ivec();
    m.confidence = r.dvec_std();
    return m;
}

std::string format_double(double value) {
    char buf[32];
    const auto result = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, result.ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    out << text;
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

namespace {

void write_csv_rows(const std::filesystem::path& path, const Matrix& m,
                    const std::vector<int>* labels, const Vector* trailing) {
    std::ostringstream out;
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j > 0) {
                out << ',';
            }
            out << format_double(m(i, j));
        }
        if (labels != nullptr) {
            out << ',' << (*labels)[static_cast<std::size_t>(i)];
        }
        if (trailing != nullptr) {
            out << ',' << format_double((*trailing)(i));
        }
        out << '\n';
    }
    write_text(path, out.str());
}

}  // namespace

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
    write_csv_rows(path, m, nullptr, nullptr);
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open CSV: " + path.string());
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            row.push_back(std::stod(cell));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        return Matrix(0, 0);
    }
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size()) {
            throw FormatError("ragged CSV row " + std::to_string(i + 1) + " in " + path.string());
        }
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
        }
    }
    return m;
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data) {
    write_csv_rows(path, data.features, &data.labels, nullptr);
}

void write_shapley_csv(const std::filesystem::path& path, const ShapleyMatrix& matrix) {
    write_csv_rows(path, matrix.values, nullptr, &matrix.base_values);
}

void write_embedding_csv(const std::filesystem::path& path, const Embedding& embedding) {
    write_csv_rows(path, embedding.coords, nullptr, nullptr);
}

void write_map_labels_csv(const std::filesystem::path& path, const DecisionMap& map) {
    std::ostringstream out;
    const int r = map.grid.resolution;
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < r; ++j) {
            if (j > 0) {
                out << ',';
            }
            out << map.label_at(i, j);
        }
        out << '\n';
    }
    write_text(path, out.str());
}

void write_map_confidence_csv(const std::filesystem::path& path, const DecisionMap& map) {
    std::ostringstream out;
    const int r = map.grid.resolution;
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < r; ++j) {
            if (j > 0) {
                out << ',';
            }
            out << format_double(map.confidence_at(i, j));
        }
        out << '\n';
    }
    write_text(path, out.str());
}

}  // namespace shapdbm

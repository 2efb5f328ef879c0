#include "permlin/io.hpp"

#include "permlin/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace permlin::io {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n'))
        s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view tok) {
    tok = trim(tok);
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw ParameterError("cannot parse number \"" + std::string(tok) + "\"");
    }
    return v;
}

Vector parse_csv_row(std::string_view line) {
    Vector row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        const std::size_t comma = std::min(line.find(',', pos), line.size());
        row.push_back(parse_number(line.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return row;
}

json parse_json_text(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParameterError(std::string("invalid JSON: ") + e.what());
    }
}

Matrix square_from_rows(const std::vector<Vector>& rows) {
    const Matrix m = Matrix::from_rows(rows);
    if (m.rows() == 0 || m.rows() != m.cols()) {
        throw ParameterError("matrix is not square: " + std::to_string(m.rows()) + " rows of " +
                             std::to_string(m.cols()) + " entries");
    }
    return m;
}

} // namespace

SymMatrix parse_matrix_json(const json& doc) {
    if (!doc.is_object() || !doc.contains("entries")) {
        throw ParameterError("matrix JSON must be an object with an \"entries\" array");
    }
    std::vector<Vector> rows;
    try {
        rows = doc.at("entries").get<std::vector<Vector>>();
    } catch (const json::exception& e) {
        throw ParameterError(std::string("matrix entries must be an array of numeric rows: ") +
                             e.what());
    }
    const Matrix m = square_from_rows(rows);
    if (doc.contains("n")) {
        if (!doc.at("n").is_number_integer() || doc.at("n").get<long long>() != static_cast<long long>(m.rows())) {
            throw ParameterError("matrix \"n\" does not match the number of rows");
        }
    }
    return SymMatrix(m);
}

SymMatrix parse_matrix_csv(std::string_view text) {
    std::vector<Vector> rows;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const std::string_view line = trim(text.substr(pos, nl - pos));
        pos = nl + 1;
        if (line.empty() || line.front() == '#') continue;
        rows.push_back(parse_csv_row(line));
    }
    return SymMatrix(square_from_rows(rows));
}

SymMatrix parse_matrix(std::string_view text) {
    const std::string_view t = trim(text);
    if (!t.empty() && t.front() == '{') return parse_matrix_json(parse_json_text(t));
    return parse_matrix_csv(t);
}

SymMatrix read_matrix_file(const std::filesystem::path& path) {
    return parse_matrix(read_text_file(path));
}

json matrix_to_json(const SymMatrix& m) {
    json doc;
    doc["n"] = m.n();
    doc["entries"] = m.to_rows();
    return doc;
}

std::string matrix_to_csv(const SymMatrix& m) {
    std::string out;
    for (std::size_t i = 0; i < m.n(); ++i) {
        for (std::size_t j = 0; j < m.n(); ++j) {
            if (j) out += ',';
            out += format_double(m(i, j));
        }
        out += '\n';
    }
    return out;
}

LinearRegimeParams parse_params_json(const json& doc) {
    if (!doc.is_object()) throw ParameterError("params JSON must be an object");
    for (const char* key : {"n", "gamma", "a", "v"})
        if (!doc.contains(key) || !doc.at(key).is_number()) {
            throw ParameterError(std::string("params JSON needs numeric \"") + key + "\"");
        }
    if (!doc.at("n").is_number_integer() || doc.at("n").get<long long>() < 2) {
        throw ParameterError("params \"n\" must be an integer >= 2");
    }
    const auto n = doc.at("n").get<std::size_t>();
    const json q = doc.value("q", json("helmert"));
    Matrix basis;
    if (q.is_string()) {
        if (q.get<std::string>() != "helmert") {
            throw ParameterError("params \"q\" must be \"helmert\" or a matrix");
        }
        basis = helmert_q(n).matrix();
    } else {
        try {
            basis = square_from_rows(q.get<std::vector<Vector>>());
        } catch (const json::exception& e) {
            throw ParameterError(std::string("params \"q\" must be a numeric matrix: ") + e.what());
        }
        if (basis.rows() != n) throw ParameterError("params \"q\" dimension does not match \"n\"");
    }
    return LinearRegimeParams(doc.at("gamma").get<double>(), doc.at("a").get<double>(),
                              doc.at("v").get<double>(), OrthonormalBasis(std::move(basis)));
}

LinearRegimeParams read_params_file(const std::filesystem::path& path) {
    return parse_params_json(parse_json_text(read_text_file(path)));
}

json params_to_json(const LinearRegimeParams& p) {
    json doc;
    doc["n"] = p.n();
    doc["gamma"] = p.gamma();
    doc["a"] = p.a();
    doc["v"] = p.v();
    doc["q"] = p.basis().matrix().to_rows();
    return doc;
}

Vector parse_vector(std::string_view text) {
    const std::string_view t = trim(text);
    if (t.empty()) throw ParameterError("empty vector");
    if (t.front() == '[') {
        const json doc = parse_json_text(t);
        try {
            return doc.get<Vector>();
        } catch (const json::exception& e) {
            throw ParameterError(std::string("vector JSON must be a numeric array: ") + e.what());
        }
    }
    if (t.find('\n') != std::string_view::npos) {
        throw ParameterError("vector CSV must be a single row");
    }
    return parse_csv_row(t);
}

json estimate_to_json(const Estimate& e) {
    json doc;
    doc["value"] = e.value;
    doc["stderr"] = e.std_error;
    doc["trials"] = e.trials;
    doc["seed"] = e.seed;
    doc["method"] = e.method;
    return doc;
}

json regime_to_json(const RegimeCheckResult& r) {
    json doc;
    doc["is_linear"] = r.is_linear;
    doc["residual"] = r.residual;
    doc["params"] = r.params ? params_to_json(*r.params) : json(nullptr);
    return doc;
}

json spectrum_to_json(const Spectrum& s) {
    json doc;
    doc["eigenvalues"] = s.values;
    std::vector<Vector> vecs;
    for (std::size_t j = 0; j < s.values.size(); ++j) vecs.push_back(s.vectors.column(j));
    doc["eigenvectors"] = vecs;
    return doc;
}

json posterior_to_json(const PosteriorTable& t) {
    json doc;
    doc["samples"] = t.samples();
    json entries = json::array();
    for (const auto& [perm, prob] : t.entries()) {
        entries.push_back({{"permutation", perm.str()}, {"probability", prob}});
    }
    doc["entries"] = entries;
    return doc;
}

void write_region_csv(std::ostream& os, const RegionSample& s) {
    const std::size_t n = s.box.dim();
    for (std::size_t i = 0; i < n; ++i) os << 'y' << (i + 1) << ',';
    os << "label\n";
    for (std::size_t k = 0; k < s.points.size(); ++k) {
        for (double v : s.points[k]) os << format_double(v) << ',';
        os << '"' << s.labels[k].str() << "\"\n";
    }
}

void write_ellipsoid_csv(std::ostream& os, const EllipsoidData& d) {
    os << "set,x1,x2,x3\n";
    auto emit = [&](const char* tag, const std::vector<Vector>& pts) {
        for (const auto& p : pts) {
            os << tag;
            for (double v : p) os << ',' << format_double(v);
            os << '\n';
        }
    };
    emit("surface", d.surface);
    emit("projection", d.projection);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParameterError("cannot open file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_double(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc{}) return std::to_string(x);
    return std::string(buf, ptr);
}

} // namespace permlin::io

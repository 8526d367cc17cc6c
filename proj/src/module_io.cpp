#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ivd/pmodule.hpp"

namespace ivd {

void write_module(std::ostream& out, const PersistenceModule& m) {
    out << "field " << m.characteristic() << '\n';
    for (std::size_t v = 0; v < m.poset().size(); ++v)
        out << "node " << v << ' ' << m.poset().label(v) << " dim=" << m.dim(v) << '\n';
    const auto& edges = m.poset().hasse_edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        out << "edge " << edges[e].first << ' ' << edges[e].second << '\n';
        const FieldMatrix& a = m.edge_map(e);
        for (std::size_t i = 0; i < a.rows(); ++i) {
            for (std::size_t j = 0; j < a.cols(); ++j) out << (j ? " " : "") << a(i, j);
            out << '\n';
        }
    }
}

namespace {

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
    throw std::runtime_error("module file line " + std::to_string(line_no) + ": " + what);
}

struct RawEdge {
    std::size_t src, dst;
    std::vector<std::vector<long long>> rows;
    std::size_t line_no;
};

} // namespace

PersistenceModule read_module(std::istream& in, std::optional<std::uint32_t> field_override) {
    std::optional<std::uint32_t> field;
    std::vector<std::string> labels;
    std::vector<std::size_t> dims;
    std::vector<RawEdge> edges;
    std::string line;
    std::size_t line_no = 0;
    std::size_t pending_rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (pending_rows > 0) {
            // Matrix rows; a zero-column matrix has empty rows.
            std::istringstream ls(line);
            std::vector<long long> row;
            long long x;
            while (ls >> x) row.push_back(x);
            if (!ls.eof()) fail(line_no, "cannot parse matrix row");
            if (row.size() != dims[edges.back().src]) fail(line_no, "matrix row has the wrong length");
            edges.back().rows.push_back(std::move(row));
            --pending_rows;
            continue;
        }
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word) || word[0] == '#') continue;
        if (word == "field") {
            std::uint32_t p;
            if (!(ls >> p)) fail(line_no, "field line needs a prime");
            field = p;
        } else if (word == "node") {
            std::size_t id;
            std::string label, dim;
            if (!(ls >> id >> label >> dim) || dim.rfind("dim=", 0) != 0) fail(line_no, "expected node <id> <label> dim=<d>");
            if (id != labels.size()) fail(line_no, "node ids must be 0, 1, 2, ... in order");
            labels.push_back(label);
            try {
                dims.push_back(std::stoul(dim.substr(4)));
            } catch (const std::exception&) {
                fail(line_no, "bad dimension '" + dim + "'");
            }
        } else if (word == "edge") {
            std::size_t a, b;
            if (!(ls >> a >> b)) fail(line_no, "expected edge <src> <dst>");
            if (a >= dims.size() || b >= dims.size()) fail(line_no, "edge refers to an undeclared node");
            edges.push_back({a, b, {}, line_no});
            pending_rows = dims[b];
        } else {
            fail(line_no, "unknown directive '" + word + "'");
        }
    }
    if (pending_rows > 0) fail(line_no, "file ends inside a matrix");
    if (!field) throw std::runtime_error("module file lacks a field line");
    const std::uint32_t p = field_override.value_or(*field);
    if (!is_prime(p)) throw std::runtime_error("module field " + std::to_string(p) + " is not prime");

    std::vector<std::pair<std::size_t, std::size_t>> rel;
    for (const auto& e : edges) rel.emplace_back(e.src, e.dst);
    FinitePoset poset(labels, rel);
    const PrimeField f(p);
    auto to_matrix = [&](const RawEdge& e) {
        FieldMatrix m(dims[e.dst], dims[e.src], p);
        for (std::size_t i = 0; i < e.rows.size(); ++i)
            for (std::size_t j = 0; j < e.rows[i].size(); ++j) {
                if (!field_override && (e.rows[i][j] < 0 || e.rows[i][j] >= static_cast<long long>(p)))
                    fail(e.line_no, "matrix entry outside [0, p)");
                m.at(i, j) = f.reduce(e.rows[i][j]);
            }
        return m;
    };
    std::vector<std::optional<FieldMatrix>> maps(poset.hasse_edges().size());
    std::vector<const RawEdge*> extra;
    for (const auto& e : edges) {
        if (auto idx = poset.hasse_index(e.src, e.dst)) {
            if (maps[*idx]) fail(e.line_no, "edge listed twice");
            maps[*idx] = to_matrix(e);
        } else {
            extra.push_back(&e);
        }
    }
    std::vector<FieldMatrix> hasse_maps;
    for (auto& m : maps) {
        if (!m) throw std::runtime_error("module file omits the map on a covering relation");
        hasse_maps.push_back(std::move(*m));
    }
    PersistenceModule module(std::move(poset), std::move(dims), std::move(hasse_maps), p);
    for (const RawEdge* e : extra)
        if (!(module.structure_map(e->src, e->dst) == to_matrix(*e)))
            fail(e->line_no, "non-covering edge disagrees with the composite of covering edges");
    return module;
}

PersistenceModule load_module(const std::string& path, std::optional<std::uint32_t> field_override) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open module file " + path);
    return read_module(in, field_override);
}

void save_module(const std::string& path, const PersistenceModule& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write module file " + path);
    write_module(out, m);
}

} // namespace ivd

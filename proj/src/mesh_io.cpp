#include "tpsfem/domain.hpp"
#include "tpsfem/error.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

namespace tpsfem {

namespace {

void expect_word(std::istream& in, const std::string& word, std::size_t& count)
{
    std::string w;
    if (!(in >> w) || w != word || !(in >> count)) {
        throw Error(ErrorCode::ParseError, "expected '" + word + " <count>'");
    }
}

} // namespace

void write_mesh(std::ostream& out, const TriMesh& mesh)
{
    out << "tpsfem-mesh v1\n";
    out << "nodes " << mesh.num_nodes() << '\n' << std::setprecision(17);
    for (NodeId i = 0; i < static_cast<NodeId>(mesh.num_nodes()); ++i) {
        const Point2 p = mesh.node(i);
        out << i << ' ' << p.x1 << ' ' << p.x2 << ' ' << (mesh.is_boundary(i) ? 1 : 0) << '\n';
    }
    out << "tris " << mesh.num_triangles() << '\n';
    for (TriId t = 0; t < static_cast<TriId>(mesh.num_triangles()); ++t) {
        const auto& tri = mesh.triangle(t);
        out << t << ' ' << tri.v[0] << ' ' << tri.v[1] << ' ' << tri.v[2] << ' ' << tri.newest << '\n';
    }
}

void write_mesh(const std::filesystem::path& path, const TriMesh& mesh)
{
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    }
    write_mesh(out, mesh);
}

TriMesh read_mesh(std::istream& in)
{
    std::string header;
    std::getline(in, header);
    if (header.rfind("tpsfem-mesh v1", 0) != 0) {
        throw Error(ErrorCode::ParseError, "missing 'tpsfem-mesh v1' header");
    }
    std::size_t n = 0;
    expect_word(in, "nodes", n);
    std::vector<Point2> nodes(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t id = 0;
        int boundary = 0;
        Point2 p;
        if (!(in >> id >> p.x1 >> p.x2 >> boundary) || id >= n) {
            throw Error(ErrorCode::ParseError, "bad node line " + std::to_string(k));
        }
        nodes[id] = p;
    }
    std::size_t m = 0;
    expect_word(in, "tris", m);
    std::vector<Triangle> tris(m);
    for (std::size_t k = 0; k < m; ++k) {
        std::size_t id = 0;
        Triangle t;
        if (!(in >> id >> t.v[0] >> t.v[1] >> t.v[2] >> t.newest) || id >= m) {
            throw Error(ErrorCode::ParseError, "bad triangle line " + std::to_string(k));
        }
        tris[id] = t;
    }
    // boundary flags are recomputed from the connectivity
    return TriMesh::from_triangles(std::move(nodes), std::move(tris));
}

TriMesh read_mesh(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    return read_mesh(in);
}

Polygon read_polygon(std::istream& in)
{
    Polygon poly;
    std::string word;
    while (in >> word) {
        if (word != "loop") {
            throw Error(ErrorCode::ParseError, "expected 'loop', got '" + word + "'");
        }
        std::size_t k = 0;
        if (!(in >> k) || k < 3) {
            throw Error(ErrorCode::ParseError, "loop needs at least 3 vertices");
        }
        std::vector<Point2> loop(k);
        for (auto& p : loop) {
            if (!(in >> p.x1 >> p.x2)) {
                throw Error(ErrorCode::ParseError, "bad polygon vertex");
            }
        }
        poly.loops.push_back(std::move(loop));
    }
    if (poly.loops.empty()) {
        throw Error(ErrorCode::ParseError, "polygon file has no loops");
    }
    return poly;
}

Polygon read_polygon(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    return read_polygon(in);
}

void write_polygon(std::ostream& out, const Polygon& polygon)
{
    out << std::setprecision(17);
    for (const auto& loop : polygon.loops) {
        out << "loop " << loop.size() << '\n';
        for (const auto& p : loop) {
            out << p.x1 << ' ' << p.x2 << '\n';
        }
    }
}

} // namespace tpsfem

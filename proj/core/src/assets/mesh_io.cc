#include "eval3d/assets/mesh_io.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "eval3d/common/error.h"

namespace eval3d {
namespace {

static_assert(std::endian::native == std::endian::little,
              "binary PLY I/O assumes a little-endian host");

std::string Lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

void FanTriangulate(const std::vector<int32_t>& poly, TriMesh* mesh) {
  for (size_t k = 1; k + 1 < poly.size(); ++k) {
    mesh->faces.push_back({poly[0], poly[k], poly[k + 1]});
  }
}

// OBJ indices are 1-based; negative values count back from the end.
int32_t ResolveObjIndex(long raw, size_t count, size_t line) {
  long idx = raw > 0 ? raw - 1 : static_cast<long>(count) + raw;
  if (raw == 0 || idx < 0) {
    throw Error(ErrorCode::kParse,
                "obj line " + std::to_string(line) + ": bad index");
  }
  return static_cast<int32_t>(idx);
}

// ---- PLY ------------------------------------------------------------------

enum class PlyType { kInt8, kUint8, kInt16, kUint16, kInt32, kUint32, kFloat32,
                     kFloat64 };

PlyType ParsePlyType(const std::string& name) {
  static const std::unordered_map<std::string, PlyType> kTypes = {
      {"char", PlyType::kInt8},     {"int8", PlyType::kInt8},
      {"uchar", PlyType::kUint8},   {"uint8", PlyType::kUint8},
      {"short", PlyType::kInt16},   {"int16", PlyType::kInt16},
      {"ushort", PlyType::kUint16}, {"uint16", PlyType::kUint16},
      {"int", PlyType::kInt32},     {"int32", PlyType::kInt32},
      {"uint", PlyType::kUint32},   {"uint32", PlyType::kUint32},
      {"float", PlyType::kFloat32}, {"float32", PlyType::kFloat32},
      {"double", PlyType::kFloat64}, {"float64", PlyType::kFloat64}};
  auto it = kTypes.find(name);
  if (it == kTypes.end()) {
    throw Error(ErrorCode::kParse, "ply: unknown property type " + name);
  }
  return it->second;
}

size_t PlyTypeSize(PlyType t) {
  switch (t) {
    case PlyType::kInt8: case PlyType::kUint8: return 1;
    case PlyType::kInt16: case PlyType::kUint16: return 2;
    case PlyType::kInt32: case PlyType::kUint32: case PlyType::kFloat32:
      return 4;
    case PlyType::kFloat64: return 8;
  }
  return 0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::kFloat32;
  bool is_list = false;
  PlyType count_type = PlyType::kUint8;
};

struct PlyElement {
  std::string name;
  size_t count = 0;
  std::vector<PlyProperty> properties;
};

class PlyValueReader {
 public:
  PlyValueReader(std::istream& in, bool binary) : in_(in), binary_(binary) {}

  double Read(PlyType type) {
    if (!binary_) {
      std::string token;
      if (!(in_ >> token)) Fail();
      double value = 0.0;
      auto [ptr, ec] =
          std::from_chars(token.data(), token.data() + token.size(), value);
      if (ec != std::errc() || ptr != token.data() + token.size()) Fail();
      return value;
    }
    unsigned char buf[8];
    const size_t n = PlyTypeSize(type);
    if (!in_.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(n)))
      Fail();
    switch (type) {
      case PlyType::kInt8: return Load<int8_t>(buf);
      case PlyType::kUint8: return Load<uint8_t>(buf);
      case PlyType::kInt16: return Load<int16_t>(buf);
      case PlyType::kUint16: return Load<uint16_t>(buf);
      case PlyType::kInt32: return Load<int32_t>(buf);
      case PlyType::kUint32: return Load<uint32_t>(buf);
      case PlyType::kFloat32: return Load<float>(buf);
      case PlyType::kFloat64: return Load<double>(buf);
    }
    return 0.0;
  }

 private:
  template <typename T>
  static double Load(const unsigned char* buf) {
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return static_cast<double>(v);
  }
  [[noreturn]] static void Fail() {
    throw Error(ErrorCode::kParse, "ply: truncated or malformed body");
  }

  std::istream& in_;
  bool binary_;
};

}  // namespace

namespace {

long ParseObjInt(const std::string& text, size_t line_no) {
  long value = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kParse, "obj line " + std::to_string(line_no) +
                                       ": bad index '" + text + "'");
  }
  return value;
}

}  // namespace

TriMesh ParseObj(std::istream& in) {
  TriMesh mesh;
  std::vector<Eigen::Vector3d> obj_normals;
  // Per-vertex normal index assigned by face corners; -2 = conflicting.
  std::vector<long> vertex_normal_ref;
  std::string line;
  size_t line_no = 0;
  std::vector<int32_t> poly;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Eigen::Vector3d p;
      if (!(ls >> p.x() >> p.y() >> p.z())) {
        throw Error(ErrorCode::kParse,
                    "obj line " + std::to_string(line_no) + ": bad vertex");
      }
      mesh.vertices.push_back(p);
      vertex_normal_ref.push_back(-1);
    } else if (tag == "vn") {
      Eigen::Vector3d n;
      if (!(ls >> n.x() >> n.y() >> n.z())) {
        throw Error(ErrorCode::kParse,
                    "obj line " + std::to_string(line_no) + ": bad normal");
      }
      obj_normals.push_back(n);
    } else if (tag == "f") {
      poly.clear();
      std::string corner;
      while (ls >> corner) {
        // v, v/vt, v/vt/vn, v//vn
        const size_t s1 = corner.find('/');
        const long v = ParseObjInt(corner.substr(0, s1), line_no);
        const int32_t vi = ResolveObjIndex(v, mesh.vertices.size(), line_no);
        if (s1 != std::string::npos) {
          const size_t s2 = corner.find('/', s1 + 1);
          if (s2 != std::string::npos && s2 + 1 < corner.size()) {
            const long n = ParseObjInt(corner.substr(s2 + 1), line_no);
            const long ni = ResolveObjIndex(n, obj_normals.size(), line_no);
            if (static_cast<size_t>(vi) < vertex_normal_ref.size()) {
              long& ref = vertex_normal_ref[vi];
              if (ref == -1) ref = ni;
              else if (ref != ni) ref = -2;
            }
          }
        }
        poly.push_back(vi);
      }
      if (poly.size() < 3) {
        throw Error(ErrorCode::kParse, "obj line " + std::to_string(line_no) +
                                           ": face with < 3 corners");
      }
      FanTriangulate(poly, &mesh);
    }
  }
  ValidateMesh(mesh);
  // Keep file normals only when every vertex maps to exactly one of them.
  const bool consistent =
      !obj_normals.empty() &&
      std::all_of(vertex_normal_ref.begin(), vertex_normal_ref.end(),
                  [&](long r) {
                    return r >= 0 && static_cast<size_t>(r) < obj_normals.size();
                  });
  if (consistent) {
    for (long r : vertex_normal_ref) {
      mesh.vertex_normals.push_back(obj_normals[r].normalized());
    }
  }
  return mesh;
}

TriMesh ParsePly(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0) {
    throw Error(ErrorCode::kParse, "ply: missing magic");
  }
  bool binary = false;
  std::vector<PlyElement> elements;
  for (;;) {
    if (!std::getline(in, line)) {
      throw Error(ErrorCode::kParse, "ply: header not terminated");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt == "ascii") binary = false;
      else if (fmt == "binary_little_endian") binary = true;
      else throw Error(ErrorCode::kParse, "ply: unsupported format " + fmt);
    } else if (key == "element") {
      PlyElement e;
      ls >> e.name >> e.count;
      elements.push_back(e);
    } else if (key == "property") {
      if (elements.empty()) {
        throw Error(ErrorCode::kParse, "ply: property before element");
      }
      PlyProperty p;
      std::string type;
      ls >> type;
      if (type == "list") {
        std::string count_type, item_type;
        ls >> count_type >> item_type >> p.name;
        p.is_list = true;
        p.count_type = ParsePlyType(count_type);
        p.type = ParsePlyType(item_type);
      } else {
        p.type = ParsePlyType(type);
        ls >> p.name;
      }
      elements.back().properties.push_back(p);
    } else if (key == "end_header") {
      break;
    }
  }

  TriMesh mesh;
  PlyValueReader reader(in, binary);
  std::vector<int32_t> poly;
  bool has_normals = false;
  for (const PlyElement& e : elements) {
    const bool is_vertex = e.name == "vertex";
    const bool is_face = e.name == "face";
    if (is_vertex) {
      has_normals = std::any_of(
          e.properties.begin(), e.properties.end(),
          [](const PlyProperty& p) { return p.name == "nx"; });
      mesh.vertices.reserve(e.count);
    }
    for (size_t i = 0; i < e.count; ++i) {
      Eigen::Vector3d pos = Eigen::Vector3d::Zero();
      Eigen::Vector3d nrm = Eigen::Vector3d::Zero();
      for (const PlyProperty& p : e.properties) {
        if (p.is_list) {
          const auto n = static_cast<size_t>(reader.Read(p.count_type));
          const bool indices = is_face && (p.name == "vertex_indices" ||
                                           p.name == "vertex_index");
          if (indices) poly.clear();
          for (size_t k = 0; k < n; ++k) {
            const double v = reader.Read(p.type);
            if (indices) poly.push_back(static_cast<int32_t>(v));
          }
          if (indices) {
            if (poly.size() < 3) {
              throw Error(ErrorCode::kParse, "ply: face with < 3 corners");
            }
            FanTriangulate(poly, &mesh);
          }
          continue;
        }
        const double v = reader.Read(p.type);
        if (!is_vertex) continue;
        if (p.name == "x") pos.x() = v;
        else if (p.name == "y") pos.y() = v;
        else if (p.name == "z") pos.z() = v;
        else if (p.name == "nx") nrm.x() = v;
        else if (p.name == "ny") nrm.y() = v;
        else if (p.name == "nz") nrm.z() = v;
      }
      if (is_vertex) {
        mesh.vertices.push_back(pos);
        if (has_normals) mesh.vertex_normals.push_back(nrm.normalized());
      }
    }
  }
  ValidateMesh(mesh);
  return mesh;
}

TriMesh LoadMesh(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open mesh " + path.string());
  const std::string ext = Lower(path.extension().string());
  if (ext == ".obj") return ParseObj(in);
  if (ext == ".ply") return ParsePly(in);
  throw Error(ErrorCode::kInvalidArgument,
              "unsupported mesh extension '" + ext + "'");
}

void WritePly(const std::filesystem::path& path, const TriMesh& mesh,
              const std::vector<Rgb8>* colors) {
  if (colors && colors->size() != mesh.vertices.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "color count does not match vertex count");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << "ply\nformat binary_little_endian 1.0\n"
      << "element vertex " << mesh.vertices.size() << "\n"
      << "property float x\nproperty float y\nproperty float z\n";
  if (colors) {
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  }
  out << "element face " << mesh.faces.size() << "\n"
      << "property list uchar int vertex_indices\nend_header\n";
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    const float xyz[3] = {static_cast<float>(mesh.vertices[i].x()),
                          static_cast<float>(mesh.vertices[i].y()),
                          static_cast<float>(mesh.vertices[i].z())};
    out.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
    if (colors) {
      const Rgb8& c = (*colors)[i];
      const unsigned char rgb[3] = {c.r, c.g, c.b};
      out.write(reinterpret_cast<const char*>(rgb), 3);
    }
  }
  for (const Face& f : mesh.faces) {
    const unsigned char n = 3;
    out.write(reinterpret_cast<const char*>(&n), 1);
    out.write(reinterpret_cast<const char*>(f.data()), sizeof(int32_t) * 3);
  }
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

void WriteObj(const std::filesystem::path& path, const TriMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.precision(17);
  for (const auto& v : mesh.vertices) {
    out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  }
  for (const Face& f : mesh.faces) {
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  }
}

}  // namespace eval3d

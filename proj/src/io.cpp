#include "edgekit/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "edgekit/binio.hpp"

namespace edgekit {

void validate(const PointCloud& cloud) {
  if (cloud.points.empty()) throw std::invalid_argument("point cloud is empty");
  if (cloud.has_labels() && cloud.labels.size() != cloud.points.size())
    throw std::invalid_argument("label count does not match point count");
  for (const auto& p : cloud.points)
    if (!p.allFinite()) throw std::invalid_argument("non-finite coordinate in point cloud");
  for (auto l : cloud.labels)
    if (l > 2) throw std::invalid_argument("label outside {0,1,2}");
}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Maps an on-disk label value to a ClassCode, applying the smooth-edge rule.
std::uint8_t map_label(long long v, const std::string& where) {
  if (v == 3) return 0;  // smooth-edge counts as non-edge
  if (v < 0 || v > 2)
    throw ParseError("label value " + std::to_string(v) + " outside {0,1,2,3} at " + where);
  return static_cast<std::uint8_t>(v);
}

struct PlyScalarType {
  int size = 0;
  bool is_float = false;
  bool is_signed = false;
};

PlyScalarType ply_scalar_type(const std::string& name, const std::string& where) {
  static const struct {
    const char* name;
    PlyScalarType t;
  } table[] = {
      {"char", {1, false, true}},    {"int8", {1, false, true}},
      {"uchar", {1, false, false}},  {"uint8", {1, false, false}},
      {"short", {2, false, true}},   {"int16", {2, false, true}},
      {"ushort", {2, false, false}}, {"uint16", {2, false, false}},
      {"int", {4, false, true}},     {"int32", {4, false, true}},
      {"uint", {4, false, false}},   {"uint32", {4, false, false}},
      {"float", {4, true, true}},    {"float32", {4, true, true}},
      {"double", {8, true, true}},   {"float64", {8, true, true}},
  };
  for (const auto& e : table)
    if (name == e.name) return e.t;
  throw ParseError("unknown PLY property type '" + name + "' at " + where);
}

struct PlyProperty {
  std::string name;
  PlyScalarType type;
  bool is_list = false;
  PlyScalarType count_type;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

struct PlyHeader {
  PlyFormat format = PlyFormat::Ascii;
  std::vector<PlyElement> elements;
  std::size_t header_bytes = 0;  // offset of the first body byte
};

PlyHeader parse_ply_header(std::istream& is) {
  PlyHeader header;
  std::string line;
  int line_no = 0;
  bool format_seen = false;
  auto where = [&]() { return "line " + std::to_string(line_no); };

  auto next_line = [&]() -> std::string& {
    if (!std::getline(is, line)) throw ParseError("unexpected end of header at " + where());
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };

  next_line();
  if (line != "ply") throw ParseError("missing 'ply' magic at line 1");

  for (;;) {
    next_line();
    std::istringstream ls(line);
    std::string keyword;
    ls >> keyword;
    if (keyword == "comment" || keyword == "obj_info" || keyword.empty()) continue;
    if (keyword == "format") {
      std::string fmt, version;
      ls >> fmt >> version;
      if (fmt == "ascii")
        header.format = PlyFormat::Ascii;
      else if (fmt == "binary_little_endian")
        header.format = PlyFormat::BinaryLittleEndian;
      else if (fmt == "binary_big_endian")
        throw ParseError("big-endian PLY is not supported (" + where() + ")");
      else
        throw ParseError("unknown PLY format '" + fmt + "' at " + where());
      format_seen = true;
    } else if (keyword == "element") {
      PlyElement el;
      ls >> el.name >> el.count;
      if (ls.fail()) throw ParseError("malformed element declaration at " + where());
      header.elements.push_back(std::move(el));
    } else if (keyword == "property") {
      if (header.elements.empty())
        throw ParseError("property before any element at " + where());
      std::string type_name;
      ls >> type_name;
      PlyProperty prop;
      if (type_name == "list") {
        std::string count_type, value_type;
        ls >> count_type >> value_type >> prop.name;
        if (ls.fail()) throw ParseError("malformed list property at " + where());
        prop.is_list = true;
        prop.count_type = ply_scalar_type(count_type, where());
        prop.type = ply_scalar_type(value_type, where());
      } else {
        ls >> prop.name;
        if (ls.fail()) throw ParseError("malformed property at " + where());
        prop.type = ply_scalar_type(type_name, where());
      }
      header.elements.back().properties.push_back(std::move(prop));
    } else if (keyword == "end_header") {
      break;
    } else {
      throw ParseError("unknown header keyword '" + keyword + "' at " + where());
    }
  }
  if (!format_seen) throw ParseError("PLY header has no format line");
  header.header_bytes = static_cast<std::size_t>(is.tellg());
  return header;
}

double decode_scalar(const unsigned char* p, const PlyScalarType& t) {
  if (t.is_float) {
    if (t.size == 4) {
      float v;
      std::memcpy(&v, p, 4);
      return static_cast<double>(v);
    }
    double v;
    std::memcpy(&v, p, 8);
    return v;
  }
  std::uint64_t raw = 0;
  std::memcpy(&raw, p, t.size);
  if (t.is_signed) {
    switch (t.size) {
      case 1: return static_cast<double>(static_cast<std::int8_t>(raw));
      case 2: return static_cast<double>(static_cast<std::int16_t>(raw));
      default: return static_cast<double>(static_cast<std::int32_t>(raw));
    }
  }
  return static_cast<double>(raw);
}

// Reads a whitespace-separated token, tracking line numbers for diagnostics.
class TokenReader {
 public:
  explicit TokenReader(std::istream& is) : is_(is) {}

  std::string next(const char* what) {
    std::string tok;
    for (;;) {
      int c = is_.get();
      if (c == EOF) {
        if (tok.empty())
          throw ParseError(std::string("unexpected end of file while reading ") + what +
                           " at line " + std::to_string(line_));
        return tok;
      }
      if (c == '\n') ++line_;
      if (std::isspace(c)) {
        if (!tok.empty()) return tok;
        continue;
      }
      tok.push_back(static_cast<char>(c));
    }
  }

  double next_double(const char* what) {
    std::string tok = next(what);
    try {
      std::size_t pos = 0;
      double v = std::stod(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw ParseError("expected number for " + std::string(what) + ", got '" + tok +
                       "' at line " + std::to_string(line_));
    }
  }

  long long next_int(const char* what) {
    std::string tok = next(what);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw ParseError("expected integer for " + std::string(what) + ", got '" + tok +
                       "' at line " + std::to_string(line_));
    return v;
  }

  int line() const { return line_; }

 private:
  std::istream& is_;
  int line_ = 1;
};

}  // namespace

PointCloud read_ply(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  PlyHeader header = parse_ply_header(is);

  PointCloud cloud;
  bool vertex_seen = false;
  for (const auto& el : header.elements) {
    const bool is_vertex = el.name == "vertex";
    if (is_vertex) {
      vertex_seen = true;
      // Locate x,y,z and an optional label/class property.
      int xi = -1, yi = -1, zi = -1, li = -1;
      for (std::size_t i = 0; i < el.properties.size(); ++i) {
        const auto& p = el.properties[i];
        std::string n = lower(p.name);
        if (p.is_list) continue;
        if (n == "x") xi = static_cast<int>(i);
        else if (n == "y") yi = static_cast<int>(i);
        else if (n == "z") zi = static_cast<int>(i);
        else if ((n == "label" || n == "class") && !p.type.is_float) li = static_cast<int>(i);
      }
      if (xi < 0 || yi < 0 || zi < 0)
        throw ParseError("vertex element lacks x,y,z properties in " + path);
      for (int idx : {xi, yi, zi})
        if (!el.properties[static_cast<std::size_t>(idx)].type.is_float)
          throw ParseError("x,y,z must be float or double in " + path);

      cloud.points.reserve(el.count);
      if (li >= 0) cloud.labels.reserve(el.count);

      if (header.format == PlyFormat::Ascii) {
        TokenReader tr(is);
        for (std::size_t v = 0; v < el.count; ++v) {
          Vec3 pt;
          long long label = 0;
          for (std::size_t i = 0; i < el.properties.size(); ++i) {
            const auto& prop = el.properties[i];
            if (prop.is_list) {
              long long n = tr.next_int("list count");
              for (long long j = 0; j < n; ++j) tr.next("list item");
              continue;
            }
            if (static_cast<int>(i) == xi) pt.x() = tr.next_double("x");
            else if (static_cast<int>(i) == yi) pt.y() = tr.next_double("y");
            else if (static_cast<int>(i) == zi) pt.z() = tr.next_double("z");
            else if (static_cast<int>(i) == li) label = tr.next_int("label");
            else tr.next("property");
          }
          cloud.points.push_back(pt);
          if (li >= 0)
            cloud.labels.push_back(map_label(label, "line " + std::to_string(tr.line())));
        }
      } else {
        // Fixed stride; list properties are not representable in a vertex row.
        std::size_t stride = 0;
        std::vector<std::size_t> offsets(el.properties.size());
        for (std::size_t i = 0; i < el.properties.size(); ++i) {
          if (el.properties[i].is_list)
            throw ParseError("list property in binary vertex element is not supported in " + path);
          offsets[i] = stride;
          stride += static_cast<std::size_t>(el.properties[i].type.size);
        }
        std::vector<unsigned char> row(stride);
        for (std::size_t v = 0; v < el.count; ++v) {
          if (!is.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(stride)))
            throw ParseError("truncated vertex data at vertex " + std::to_string(v) + " (byte offset " +
                             std::to_string(header.header_bytes + v * stride) + ") in " + path);
          Vec3 pt(decode_scalar(row.data() + offsets[static_cast<std::size_t>(xi)], el.properties[static_cast<std::size_t>(xi)].type),
                  decode_scalar(row.data() + offsets[static_cast<std::size_t>(yi)], el.properties[static_cast<std::size_t>(yi)].type),
                  decode_scalar(row.data() + offsets[static_cast<std::size_t>(zi)], el.properties[static_cast<std::size_t>(zi)].type));
          cloud.points.push_back(pt);
          if (li >= 0) {
            long long lv = static_cast<long long>(
                decode_scalar(row.data() + offsets[static_cast<std::size_t>(li)], el.properties[static_cast<std::size_t>(li)].type));
            cloud.labels.push_back(map_label(lv, "vertex " + std::to_string(v)));
          }
        }
      }
      break;  // vertex data parsed; trailing elements are irrelevant here
    }

    // Skip a non-vertex element that precedes vertex data.
    if (header.format == PlyFormat::Ascii) {
      TokenReader tr(is);
      for (std::size_t v = 0; v < el.count; ++v) {
        for (const auto& prop : el.properties) {
          if (prop.is_list) {
            long long n = tr.next_int("list count");
            for (long long j = 0; j < n; ++j) tr.next("list item");
          } else {
            tr.next("property");
          }
        }
      }
    } else {
      std::size_t stride = 0;
      for (const auto& prop : el.properties) {
        if (prop.is_list)
          throw ParseError("cannot skip binary element '" + el.name +
                           "' with list properties before vertex data in " + path);
        stride += static_cast<std::size_t>(prop.type.size);
      }
      is.seekg(static_cast<std::streamoff>(stride * el.count), std::ios::cur);
      if (!is) throw ParseError("truncated element '" + el.name + "' in " + path);
    }
  }

  if (!vertex_seen) throw ParseError("no vertex element in " + path);
  if (cloud.points.empty()) throw ParseError("vertex element declares zero vertices in " + path);
  validate(cloud);
  return cloud;
}

PointCloud read_xyz(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  PointCloud cloud;
  std::string line;
  int line_no = 0;
  int columns = 0;  // 3 or 4, fixed by the first data line
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream ls(line);
    std::vector<std::string> toks;
    std::string tok;
    while (ls >> tok) toks.push_back(tok);

    if (columns == 0) {
      if (toks.size() != 3 && toks.size() != 4)
        throw ParseError("expected 3 or 4 columns, got " + std::to_string(toks.size()) +
                         " at line " + std::to_string(line_no));
      columns = static_cast<int>(toks.size());
    } else if (static_cast<int>(toks.size()) != columns) {
      throw ParseError("inconsistent column count (" + std::to_string(toks.size()) + " vs " +
                       std::to_string(columns) + ") at line " + std::to_string(line_no));
    }

    Vec3 pt;
    for (int i = 0; i < 3; ++i) {
      try {
        std::size_t pos = 0;
        pt[i] = std::stod(toks[static_cast<std::size_t>(i)], &pos);
        if (pos != toks[static_cast<std::size_t>(i)].size()) throw std::invalid_argument(toks[static_cast<std::size_t>(i)]);
      } catch (const std::exception&) {
        throw ParseError("non-numeric token '" + toks[static_cast<std::size_t>(i)] + "' at line " +
                         std::to_string(line_no));
      }
    }
    cloud.points.push_back(pt);
    if (columns == 4) {
      long long v = 0;
      const std::string& t = toks[3];
      auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (ec != std::errc() || ptr != t.data() + t.size())
        throw ParseError("non-integer label '" + t + "' at line " + std::to_string(line_no));
      cloud.labels.push_back(map_label(v, "line " + std::to_string(line_no)));
    }
  }
  if (cloud.points.empty()) throw ParseError("no points in " + path);
  validate(cloud);
  return cloud;
}

void atomic_write_file(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
    os.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!os) throw IoError("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

namespace {

void append_double_ascii(std::string& out, double v) {
  char buf[32];
  int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  out.append(buf, static_cast<std::size_t>(n));
}

}  // namespace

void write_ply(const PointCloud& cloud, const std::string& path, PlyFormat format) {
  validate(cloud);
  const bool labeled = cloud.has_labels();
  std::string out;
  out.reserve(128 + cloud.size() * (format == PlyFormat::Ascii ? 60 : 25));
  out += "ply\n";
  out += format == PlyFormat::Ascii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n";
  out += "element vertex " + std::to_string(cloud.size()) + "\n";
  out += "property double x\nproperty double y\nproperty double z\n";
  if (labeled) out += "property uchar label\n";
  out += "end_header\n";

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    if (format == PlyFormat::Ascii) {
      append_double_ascii(out, p.x());
      out += ' ';
      append_double_ascii(out, p.y());
      out += ' ';
      append_double_ascii(out, p.z());
      if (labeled) {
        out += ' ';
        out += std::to_string(static_cast<int>(cloud.labels[i]));
      }
      out += '\n';
    } else {
      char buf[25];
      std::memcpy(buf, p.data(), 24);
      std::size_t n = 24;
      if (labeled) {
        buf[24] = static_cast<char>(cloud.labels[i]);
        n = 25;
      }
      out.append(buf, n);
    }
  }
  atomic_write_file(path, out);
}

void write_classified_ply(const PointCloud& cloud,
                          const std::vector<std::uint8_t>& predictions,
                          const std::string& path, PlyFormat format) {
  if (predictions.size() != cloud.size())
    throw std::invalid_argument("prediction count does not match point count");
  static constexpr unsigned char kColors[3][3] = {
      {128, 128, 128},  // non-edge
      {255, 0, 0},      // sharp-edge
      {0, 255, 0},      // boundary
  };
  for (auto p : predictions)
    if (p > 2) throw std::invalid_argument("prediction outside {0,1,2}");

  std::string out;
  out.reserve(192 + cloud.size() * (format == PlyFormat::Ascii ? 70 : 28));
  out += "ply\n";
  out += format == PlyFormat::Ascii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n";
  out += "element vertex " + std::to_string(cloud.size()) + "\n";
  out += "property double x\nproperty double y\nproperty double z\n";
  out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out += "property uchar label\n";
  out += "end_header\n";

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    const unsigned char* c = kColors[predictions[i]];
    if (format == PlyFormat::Ascii) {
      append_double_ascii(out, p.x());
      out += ' ';
      append_double_ascii(out, p.y());
      out += ' ';
      append_double_ascii(out, p.z());
      for (int j = 0; j < 3; ++j) {
        out += ' ';
        out += std::to_string(static_cast<int>(c[j]));
      }
      out += ' ';
      out += std::to_string(static_cast<int>(predictions[i]));
      out += '\n';
    } else {
      char buf[28];
      std::memcpy(buf, p.data(), 24);
      buf[24] = static_cast<char>(c[0]);
      buf[25] = static_cast<char>(c[1]);
      buf[26] = static_cast<char>(c[2]);
      buf[27] = static_cast<char>(predictions[i]);
      out.append(buf, 28);
    }
  }
  atomic_write_file(path, out);
}

}  // namespace edgekit

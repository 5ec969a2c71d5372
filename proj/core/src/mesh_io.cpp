// Copyright 2026 The esdf authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "esdf/mesh_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "esdf/errors.hpp"

namespace esdf {

namespace {

// First integer of an OBJ face corner like "12", "12/3" or "12//4".
long parse_face_index(const std::string& token) {
  std::size_t slash = token.find('/');
  return std::stol(slash == std::string::npos ? token : token.substr(0, slash));
}

[[noreturn]] void parse_fail(const std::string& name, std::size_t line_no,
                             const std::string& what) {
  throw data_error(name + ":" + std::to_string(line_no) + ": " + what);
}

void validate_and_report(const TriangleMesh& mesh, const std::string& name) {
  if (mesh.faces.empty()) throw data_error(name + ": no faces");
  WatertightReport report = check_watertight(mesh);
  if (report.ok()) return;

  std::ostringstream msg;
  if (report.has_degenerate_faces) {
    msg << name << ": degenerate faces present";
  } else if (!report.watertight) {
    msg << name << ": not watertight, " << report.bad_edges.size() << " boundary edge(s):";
    std::size_t shown = std::min<std::size_t>(report.bad_edges.size(), 32);
    for (std::size_t i = 0; i < shown; ++i)
      msg << " (" << report.bad_edges[i][0] << "," << report.bad_edges[i][1] << ")";
    if (shown < report.bad_edges.size()) msg << " ...";
  } else {
    msg << name << ": inconsistent face orientation across " << report.bad_edges.size()
        << " edge(s)";
  }
  throw data_error(msg.str());
}

}  // namespace

MeshFormat mesh_format_from_path(const std::string& path) {
  auto dot = path.rfind('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  for (char& c : ext) c = static_cast<char>(std::tolower(c));
  if (ext == "obj") return MeshFormat::obj;
  if (ext == "off") return MeshFormat::off;
  throw data_error("unrecognized mesh extension: " + path);
}

TriangleMesh parse_obj(std::istream& in, const std::string& name) {
  TriangleMesh mesh;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 v;
      if (!(ls >> v.x >> v.y >> v.z)) parse_fail(name, line_no, "bad vertex record");
      mesh.vertices.push_back(v);
    } else if (tag == "f") {
      std::vector<long> idx;
      std::string tok;
      while (ls >> tok) {
        long i;
        try {
          i = parse_face_index(tok);
        } catch (const std::exception&) {
          parse_fail(name, line_no, "bad face index '" + tok + "'");
        }
        // negative OBJ indices are relative to the current vertex count
        if (i < 0) i = static_cast<long>(mesh.vertices.size()) + i + 1;
        if (i < 1 || i > static_cast<long>(mesh.vertices.size()))
          parse_fail(name, line_no, "face index out of range");
        idx.push_back(i - 1);
      }
      if (idx.size() < 3) parse_fail(name, line_no, "face with fewer than 3 corners");
      // fan-triangulate polygons
      for (std::size_t c = 1; c + 1 < idx.size(); ++c) {
        mesh.faces.push_back({static_cast<std::uint32_t>(idx[0]),
                              static_cast<std::uint32_t>(idx[c]),
                              static_cast<std::uint32_t>(idx[c + 1])});
      }
    }
    // vn/vt/usemtl/o/g/s records are ignored
  }
  return mesh;
}

TriangleMesh parse_off(std::istream& in, const std::string& name) {
  std::string header;
  std::size_t line_no = 0;
  auto next_content_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++line_no;
      std::size_t pos = out.find_first_not_of(" \t\r");
      if (pos == std::string::npos || out[pos] == '#') continue;
      return true;
    }
    return false;
  };

  if (!next_content_line(header)) throw data_error(name + ": empty OFF file");
  std::istringstream hs(header);
  std::string magic;
  hs >> magic;
  if (magic != "OFF") parse_fail(name, line_no, "missing OFF header");

  std::size_t nv = 0, nf = 0, ne = 0;
  std::string counts;
  if (!(hs >> nv >> nf >> ne)) {
    if (!next_content_line(counts)) parse_fail(name, line_no, "missing count line");
    std::istringstream cs(counts);
    if (!(cs >> nv >> nf >> ne)) parse_fail(name, line_no, "bad count line");
  }

  TriangleMesh mesh;
  mesh.vertices.reserve(nv);
  std::string line;
  for (std::size_t i = 0; i < nv; ++i) {
    if (!next_content_line(line)) parse_fail(name, line_no, "truncated vertex list");
    std::istringstream ls(line);
    Vec3 v;
    if (!(ls >> v.x >> v.y >> v.z)) parse_fail(name, line_no, "bad vertex record");
    mesh.vertices.push_back(v);
  }
  for (std::size_t i = 0; i < nf; ++i) {
    if (!next_content_line(line)) parse_fail(name, line_no, "truncated face list");
    std::istringstream ls(line);
    std::size_t arity = 0;
    if (!(ls >> arity) || arity < 3) parse_fail(name, line_no, "bad face record");
    std::vector<std::uint32_t> idx(arity);
    for (std::size_t c = 0; c < arity; ++c) {
      long v;
      if (!(ls >> v) || v < 0 || v >= static_cast<long>(nv))
        parse_fail(name, line_no, "face index out of range");
      idx[c] = static_cast<std::uint32_t>(v);
    }
    for (std::size_t c = 1; c + 1 < arity; ++c)
      mesh.faces.push_back({idx[0], idx[c], idx[c + 1]});
  }
  return mesh;
}

TriangleMesh load_mesh(const std::string& path, MeshFormat format) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open mesh file: " + path);
  TriangleMesh mesh =
      format == MeshFormat::obj ? parse_obj(in, path) : parse_off(in, path);
  validate_and_report(mesh, path);
  normalize_to_box(mesh);
  return mesh;
}

TriangleMesh load_mesh(const std::string& path) {
  return load_mesh(path, mesh_format_from_path(path));
}

void write_obj(const TriangleMesh& mesh, std::ostream& out) {
  char buf[128];
  for (const Vec3& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "v %.9g %.9g %.9g\n", v.x, v.y, v.z);
    out << buf;
  }
  for (const auto& f : mesh.faces) {
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  }
}

void save_obj(const TriangleMesh& mesh, const std::string& path) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw data_error("cannot write mesh file: " + path);
    write_obj(mesh, out);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw data_error("cannot finalize mesh file: " + path);
}

}  // namespace esdf

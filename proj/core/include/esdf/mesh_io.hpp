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

#pragma once

#include <iosfwd>
#include <string>

#include "esdf/mesh.hpp"

namespace esdf {

enum class MeshFormat { obj, off };

// Infers OBJ/OFF from the file extension; throws data_error otherwise.
MeshFormat mesh_format_from_path(const std::string& path);

// Reads, validates (watertight + consistently oriented, offending edges
// reported otherwise) and normalizes the mesh into [-0.45, 0.45]^3.
TriangleMesh load_mesh(const std::string& path, MeshFormat format);
TriangleMesh load_mesh(const std::string& path);

// Parse-only entry points, no validation or normalization.
TriangleMesh parse_obj(std::istream& in, const std::string& name);
TriangleMesh parse_off(std::istream& in, const std::string& name);

void save_obj(const TriangleMesh& mesh, const std::string& path);
void write_obj(const TriangleMesh& mesh, std::ostream& out);

}  // namespace esdf

#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gelfand/common.hpp"
#include "gelfand/grid.hpp"

namespace gelfand {

using json = nlohmann::json;

/// CSV writer with the reproducibility contract: numeric cells are formatted
/// by the caller (format_g17), rows come pre-ordered, output is plain LF.
inline void write_csv(const std::filesystem::path& path,
                      const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  for (std::size_t c = 0; c < header.size(); ++c)
    out << header[c] << (c + 1 < header.size() ? "," : "\n");
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c)
      out << row[c] << (c + 1 < row.size() ? "," : "\n");
}

inline json generator_json(const GeneratorCurve& g) {
  json j;
  switch (g.kind) {
    case GeneratorKind::quarter_disc:
      j["kind"] = "quarter_disc";
      j["radius"] = g.radius;
      break;
    case GeneratorKind::super_ellipse:
      j["kind"] = "super_ellipse";
      j["rs"] = g.rs;
      j["rt"] = g.rt;
      j["exponent"] = g.exponent;
      break;
    case GeneratorKind::dumbbell:
      j["kind"] = "dumbbell";
      j["lobe_a"] = {g.lobe_a.s, g.lobe_a.t};
      j["lobe_b"] = {g.lobe_b.s, g.lobe_b.t};
      j["lobe_radius"] = g.lobe_radius;
      j["neck_width"] = g.neck_width;
      break;
  }
  return j;
}

inline json field_header(const Grid& g) {
  json j;
  j["h"] = g.h;
  j["m"] = g.m();
  j["k"] = g.k();
  j["generator"] = generator_json(g.spec.generator);
  j["counts"] = {{"interior", g.count_class(NodeClass::interior)},
                 {"axis_s", g.count_class(NodeClass::axis_s)},
                 {"axis_t", g.count_class(NodeClass::axis_t)},
                 {"origin", g.count_class(NodeClass::origin)},
                 {"dirichlet", g.count_class(NodeClass::dirichlet)},
                 {"exterior", g.count_class(NodeClass::exterior)}};
  return j;
}

/// Nodal field dump: one row per active node, columns i, j, s, t, value,
/// plus a JSON side file with the grid header.
inline void dump_field(const Grid& g, const std::vector<double>& u,
                       const std::filesystem::path& csv_path) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(g.active_count());
  for (int a = 0; a < g.active_count(); ++a) {
    const int f = g.node_of_active[a];
    const int i = f % g.ni, j = f / g.ni;
    rows.push_back({std::to_string(i), std::to_string(j), format_g17(g.s_of(i)),
                    format_g17(g.t_of(j)), format_g17(u[a])});
  }
  write_csv(csv_path, {"i", "j", "s", "t", "value"}, rows);

  std::filesystem::path hdr = csv_path;
  hdr.replace_extension(".json");
  std::ofstream out(hdr, std::ios::binary);
  out << field_header(g).dump(2) << "\n";
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << "\n";
}

}  // namespace gelfand

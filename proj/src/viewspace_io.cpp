#include "prv/viewspace_io.hpp"

#include <charconv>

#include "prv/errors.hpp"

namespace prv {
namespace {

void append_vec(std::string& out, std::initializer_list<double> values) {
  out += '[';
  bool first = true;
  for (double v : values) {
    if (!first) out += ',';
    out += format_double(v);
    first = false;
  }
  out += ']';
}

void append_viewspace(std::string& out, const ViewSpace& vs) {
  out += "{\"center\":";
  append_vec(out, {vs.center.x(), vs.center.y(), vs.center.z()});
  out += ",\"radius\":";
  out += format_double(vs.radius);
  out += ",\"kind\":\"";
  out += to_string(vs.kind);
  out += "\",\"poses\":[";
  for (std::size_t i = 0; i < vs.poses.size(); ++i) {
    const auto& p = vs.poses[i];
    if (i > 0) out += ',';
    out += "{\"position\":";
    append_vec(out, {p.position.x(), p.position.y(), p.position.z()});
    out += ",\"quaternion\":";
    const auto& q = p.orientation;
    append_vec(out, {q.w(), q.x(), q.y(), q.z()});
    out += '}';
  }
  out += "]}";
}

Vec3 read_vec3(const Json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 3) throw FormatError(context + ": expected [x,y,z]");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[static_cast<std::size_t>(i)].is_number()) {
      throw FormatError(context + ": non-numeric component");
    }
    v[i] = j[static_cast<std::size_t>(i)].get<double>();
  }
  return v;
}

}  // namespace

std::string viewspace_to_json(const ViewSpace& vs) {
  std::string out;
  append_viewspace(out, vs);
  out += '\n';
  return out;
}

ViewSpace viewspace_from_json(const Json& j, const std::string& context) {
  ViewSpace vs;
  vs.center = read_vec3(require(j, "center", context), context + ".center");
  vs.radius = require_number(j, "radius", context);
  const Json& kind = require(j, "kind", context);
  if (!kind.is_string()) throw FormatError(context + ": 'kind' must be a string");
  try {
    vs.kind = parse_viewspace_kind(kind.get<std::string>());
  } catch (const InvalidArgument& e) {
    throw FormatError(context + ": " + e.what());
  }
  const Json& poses = require(j, "poses", context);
  if (!poses.is_array()) throw FormatError(context + ": 'poses' must be an array");
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const std::string where = context + ".poses[" + std::to_string(i) + "]";
    ViewPose pose;
    pose.position = read_vec3(require(poses[i], "position", where), where + ".position");
    const Json& q = require(poses[i], "quaternion", where);
    if (!q.is_array() || q.size() != 4) throw FormatError(where + ": expected [w,x,y,z]");
    for (const auto& c : q) {
      if (!c.is_number()) throw FormatError(where + ": non-numeric quaternion");
    }
    pose.orientation = Eigen::Quaterniond(q[0].get<double>(), q[1].get<double>(),
                                          q[2].get<double>(), q[3].get<double>());
    vs.poses.push_back(pose);
  }
  try {
    validate(vs);
  } catch (const InvalidArgument& e) {
    throw FormatError(context + ": " + e.what());
  }
  return vs;
}

void save_viewspace(const std::filesystem::path& path, const ViewSpace& vs) {
  write_text_file(path, viewspace_to_json(vs));
}

ViewSpace load_viewspace(const std::filesystem::path& path) {
  return viewspace_from_json(load_json_file(path), path.string());
}

TammesTable build_tammes_table(int n_lo, int n_hi, double radius, const TammesOptions& options) {
  if (n_lo < 1 || n_hi < n_lo) throw InvalidArgument("tammes table: invalid range");
  TammesTable table;
  table.radius = radius;
  for (int n = n_lo; n <= n_hi; ++n) {
    table.entries.emplace(n, tammes_hemisphere(n, radius, options));
  }
  return table;
}

TableLookup lookup(const TammesTable& table, int n, const TammesOptions& options) {
  const auto it = table.entries.find(n);
  if (it != table.entries.end()) return {it->second, false};
  return {tammes_hemisphere(n, table.radius, options), true};
}

std::string table_to_json(const TammesTable& table) {
  std::string out = "{\"radius\":" + format_double(table.radius) + ",\"entries\":{";
  bool first = true;
  for (const auto& [n, vs] : table.entries) {
    if (!first) out += ',';
    first = false;
    out += '"';
    out += std::to_string(n);
    out += "\":";
    append_viewspace(out, vs);
  }
  out += "}}\n";
  return out;
}

TammesTable table_from_json(const Json& j, const std::string& context) {
  TammesTable table;
  table.radius = require_number(j, "radius", context);
  const Json& entries = require(j, "entries", context);
  if (!entries.is_object()) throw FormatError(context + ": 'entries' must be an object");
  for (auto it = entries.begin(); it != entries.end(); ++it) {
    const std::string& key = it.key();
    int n = 0;
    const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), n);
    if (ec != std::errc() || ptr != key.data() + key.size() || n < 1) {
      throw FormatError(context + ": entry key '" + key + "' is not a positive integer");
    }
    ViewSpace vs = viewspace_from_json(it.value(), context + ".entries." + key);
    if (static_cast<int>(vs.size()) != n) {
      throw FormatError(context + ": entry " + key + " has " + std::to_string(vs.size()) +
                        " poses");
    }
    table.entries.emplace(n, std::move(vs));
  }
  return table;
}

void save_table(const std::filesystem::path& path, const TammesTable& table) {
  write_text_file(path, table_to_json(table));
}

TammesTable load_table(const std::filesystem::path& path) {
  return table_from_json(load_json_file(path), path.string());
}

}  // namespace prv

#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "prv/io.hpp"
#include "prv/viewspace.hpp"

namespace prv {

// View-space JSON, fixed field order:
//   {"center":[x,y,z],"radius":r,"kind":"tammes",
//    "poses":[{"position":[x,y,z],"quaternion":[w,x,y,z]},...]}
std::string viewspace_to_json(const ViewSpace& vs);
ViewSpace viewspace_from_json(const Json& j, const std::string& context = "view space");
void save_viewspace(const std::filesystem::path& path, const ViewSpace& vs);
ViewSpace load_viewspace(const std::filesystem::path& path);

// Pre-computed Tammes spaces keyed by view count.
//   {"radius":r,"entries":{"13":{...view space...},...}}
struct TammesTable {
  double radius = 0.3;
  std::map<int, ViewSpace> entries;
};

struct TableLookup {
  ViewSpace space;
  bool computed_fallback = false;  // n was absent from the table
};

TammesTable build_tammes_table(int n_lo, int n_hi, double radius, const TammesOptions& options = {});

// Returns the stored entry, or solves for n with `options` and flags it.
TableLookup lookup(const TammesTable& table, int n, const TammesOptions& options = {});

std::string table_to_json(const TammesTable& table);
TammesTable table_from_json(const Json& j, const std::string& context = "tammes table");
void save_table(const std::filesystem::path& path, const TammesTable& table);
TammesTable load_table(const std::filesystem::path& path);

}  // namespace prv

#include "opera/costmodel.hpp"

#include <cmath>
#include <stdexcept>

#include "opera/csv.hpp"

namespace opera {

double alpha_clos(int tiers, double oversub) {
  if (tiers < 2) throw std::invalid_argument("alpha_clos: tiers must be >= 2");
  if (oversub <= 0) throw std::invalid_argument("alpha_clos: oversub must be positive");
  return 2.0 * (tiers - 1) / oversub;
}

double alpha_expander(int uplinks, int tor_radix) {
  if (uplinks <= 0) throw std::invalid_argument("alpha_expander: uplinks must be positive");
  if (uplinks >= tor_radix)
    throw std::invalid_argument("alpha_expander: uplinks must leave host ports (u < k)");
  return static_cast<double>(uplinks) / (tor_radix - uplinks);
}

HostsForAlpha hosts_for_alpha(int tor_radix, double alpha) {
  if (tor_radix < 2 || tor_radix % 2 != 0)
    throw std::invalid_argument("hosts_for_alpha: tor_radix must be even and >= 2");
  if (alpha <= 0) throw std::invalid_argument("hosts_for_alpha: alpha must be positive");
  // three-tier basis: F = 2(T-1)/alpha with T = 3
  double F = 4.0 / alpha;
  if (F < 1.0)
    throw std::invalid_argument("hosts_for_alpha: alpha > 4 implies undersubscription");
  HostsForAlpha out;
  out.oversub = F;
  double half = tor_radix / 2.0;
  out.hosts_exact = (4.0 * F / (F + 1.0)) * half * half * half;
  out.hosts = std::lround(out.hosts_exact);
  return out;
}

double alpha_from_parts(const std::vector<PartCost>& parts) {
  double stat = 0, oper = 0;
  for (const auto& p : parts) {
    stat += p.static_dollars;
    oper += p.opera_dollars;
  }
  if (stat <= 0) throw std::invalid_argument("alpha_from_parts: static total must be positive");
  return oper / stat;
}

std::vector<PartCost> load_parts_csv(const std::string& path) {
  auto rows = read_csv(path);
  std::vector<PartCost> parts;
  for (const auto& row : rows) {
    if (row.size() != 3) throw std::runtime_error(path + ": expected 3 columns");
    if (row[0] == "component") continue;  // header
    PartCost p;
    p.component = row[0];
    p.static_dollars = std::stod(row[1]);
    p.opera_dollars = std::stod(row[2]);
    parts.push_back(std::move(p));
  }
  return parts;
}

void save_parts_csv(const std::vector<PartCost>& parts, const std::string& path) {
  CsvWriter w(path);
  w.row({"component", "static_dollars", "opera_dollars"});
  for (const auto& p : parts)
    w.row({p.component, fmt_double(p.static_dollars), fmt_double(p.opera_dollars)});
}

std::vector<PartCost> default_parts() {
  // Rotor-side adders are amortized over a 512-port circuit switch.
  return {
      {"sr_transceiver", 80, 80},
      {"optical_fiber", 45, 45},
      {"tor_port", 90, 90},
      {"optical_fiber_array", 0, 30},
      {"optical_lenses", 0, 15},
      {"beam_steering_element", 0, 5},
      {"optical_mapping", 0, 10},
  };
}

}  // namespace opera

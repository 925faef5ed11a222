#include "sgsurf/lattice.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace sgsurf {

std::size_t LatticeSpec::volume() const {
  std::size_t v = 1;
  for (int side : sides) v *= static_cast<std::size_t>(side);
  return v;
}

std::size_t LatticeSpec::cross_section_sum() const {
  std::size_t sum = 0;
  const std::size_t v = volume();
  for (int side : sides) sum += v / static_cast<std::size_t>(side);
  return sum;
}

LatticeSpec LatticeSpec::magnified(int k) const {
  LatticeSpec out = *this;
  for (int& side : out.sides) side *= k;
  return out;
}

std::string to_string(GeometryKind kind) {
  switch (kind) {
    case GeometryKind::FreeBlock: return "free";
    case GeometryKind::Torus: return "torus";
    case GeometryKind::MagnifiedTorus: return "magnified_torus";
  }
  return "unknown";
}

void validate_spec(const LatticeSpec& spec, GeometryKind kind) {
  if (spec.dim < 1) throw std::invalid_argument("lattice: dimension d must be >= 1");
  if (spec.sides.size() != static_cast<std::size_t>(spec.dim)) {
    throw std::invalid_argument("lattice: expected " + std::to_string(spec.dim) +
                                " sides, got " + std::to_string(spec.sides.size()));
  }
  const int min_side = kind == GeometryKind::FreeBlock ? 2 : 3;
  for (std::size_t i = 0; i < spec.sides.size(); ++i) {
    if (spec.sides[i] < min_side) {
      throw std::invalid_argument("lattice: side L_" + std::to_string(i + 1) + " = " +
                                  std::to_string(spec.sides[i]) + " violates L_i >= " +
                                  std::to_string(min_side) + " for " + to_string(kind) +
                                  " geometry");
    }
  }
}

namespace {

std::vector<std::size_t> strides_of(const LatticeSpec& spec) {
  std::vector<std::size_t> strides(spec.sides.size());
  std::size_t s = 1;
  for (std::size_t i = 0; i < spec.sides.size(); ++i) {
    strides[i] = s;
    s *= static_cast<std::size_t>(spec.sides[i]);
  }
  return strides;
}

std::vector<int> coords_of(const LatticeSpec& spec, std::size_t site) {
  std::vector<int> x(spec.sides.size());
  for (std::size_t i = 0; i < spec.sides.size(); ++i) {
    x[i] = static_cast<int>(site % static_cast<std::size_t>(spec.sides[i]));
    site /= static_cast<std::size_t>(spec.sides[i]);
  }
  return x;
}

std::vector<Bond> box_bonds(const LatticeSpec& spec, bool periodic) {
  const auto strides = strides_of(spec);
  const std::size_t n = spec.volume();
  std::vector<Bond> bonds;
  for (int axis = 0; axis < spec.dim; ++axis) {
    const int side = spec.sides[static_cast<std::size_t>(axis)];
    const std::size_t stride = strides[static_cast<std::size_t>(axis)];
    for (std::size_t site = 0; site < n; ++site) {
      const int xi = static_cast<int>((site / stride) % static_cast<std::size_t>(side));
      if (xi + 1 < side) {
        bonds.push_back({site, site + stride, axis, false});
      } else if (periodic) {
        const std::size_t origin = site - static_cast<std::size_t>(side - 1) * stride;
        bonds.push_back({origin, site, axis, true});
      }
    }
  }
  std::sort(bonds.begin(), bonds.end(), [](const Bond& a, const Bond& b) {
    return std::tie(a.axis, a.site_a, a.site_b) < std::tie(b.axis, b.site_a, b.site_b);
  });
  return bonds;
}

}  // namespace

LatticeGeometry::LatticeGeometry(LatticeSpec base, GeometryKind kind, int k, LatticeSpec actual,
                                 std::vector<Bond> bonds, std::vector<BondRole> roles)
    : base_(std::move(base)),
      kind_(kind),
      k_(k),
      actual_(std::move(actual)),
      bonds_(std::move(bonds)),
      roles_(std::move(roles)) {}

std::size_t LatticeGeometry::block_count() const {
  if (kind_ != GeometryKind::MagnifiedTorus) return 1;
  std::size_t blocks = 1;
  for (int i = 0; i < base_.dim; ++i) blocks *= static_cast<std::size_t>(k_);
  return blocks;
}

std::vector<std::size_t> LatticeGeometry::bonds_with_role(RoleKind kind) const {
  std::vector<std::size_t> out;
  for (std::size_t b = 0; b < roles_.size(); ++b) {
    if (roles_[b].kind == kind) out.push_back(b);
  }
  return out;
}

std::vector<std::size_t> LatticeGeometry::block_bonds(int block) const {
  std::vector<std::size_t> out;
  for (std::size_t b = 0; b < roles_.size(); ++b) {
    if (roles_[b].kind == RoleKind::BlockInterior && roles_[b].block == block) out.push_back(b);
  }
  return out;
}

std::vector<int> LatticeGeometry::coordinates(std::size_t site) const {
  return coords_of(actual_, site);
}

int LatticeGeometry::block_of_site(std::size_t site) const {
  if (kind_ != GeometryKind::MagnifiedTorus) return 0;
  const auto x = coords_of(actual_, site);
  int block = 0;
  int scale = 1;
  for (std::size_t i = 0; i < x.size(); ++i) {
    block += (x[i] / base_.sides[i]) * scale;
    scale *= k_;
  }
  return block;
}

std::vector<std::size_t> LatticeGeometry::degrees() const {
  std::vector<std::size_t> deg(site_count(), 0);
  for (const Bond& b : bonds_) {
    ++deg[b.site_a];
    ++deg[b.site_b];
  }
  return deg;
}

LatticeGeometry build_geometry(const LatticeSpec& spec, GeometryKind kind) {
  if (kind == GeometryKind::MagnifiedTorus) return magnified_partition(spec, 1);
  validate_spec(spec, kind);
  const bool periodic = kind == GeometryKind::Torus;
  auto bonds = box_bonds(spec, periodic);
  std::vector<BondRole> roles(bonds.size());
  for (std::size_t b = 0; b < bonds.size(); ++b) {
    if (bonds[b].wrap) roles[b] = {RoleKind::Cut, -1};
  }
  return LatticeGeometry(spec, kind, 1, spec, std::move(bonds), std::move(roles));
}

std::vector<Bond> cut_set(const LatticeGeometry& torus) {
  if (torus.kind() != GeometryKind::Torus) {
    throw std::invalid_argument("cut_set: geometry must be a torus, got " +
                                to_string(torus.kind()));
  }
  std::vector<Bond> out;
  for (const Bond& b : torus.bonds()) {
    if (b.wrap) out.push_back(b);
  }
  return out;
}

LatticeGeometry magnified_partition(const LatticeSpec& spec, int k) {
  if (k < 1) throw std::invalid_argument("magnified_partition: k must be >= 1");
  validate_spec(spec, GeometryKind::FreeBlock);
  const LatticeSpec big = spec.magnified(k);
  for (std::size_t i = 0; i < big.sides.size(); ++i) {
    if (big.sides[i] < 3) {
      throw std::invalid_argument("magnified_partition: k*L_" + std::to_string(i + 1) + " = " +
                                  std::to_string(big.sides[i]) + " violates k*L_i >= 3");
    }
  }
  auto bonds = box_bonds(big, true);
  LatticeGeometry shell(spec, GeometryKind::MagnifiedTorus, k, big, {}, {});
  std::vector<BondRole> roles(bonds.size());
  for (std::size_t b = 0; b < bonds.size(); ++b) {
    const int ba = shell.block_of_site(bonds[b].site_a);
    const int bb = shell.block_of_site(bonds[b].site_b);
    if (bonds[b].wrap || ba != bb) {
      roles[b] = {RoleKind::Corridor, -1};
    } else {
      roles[b] = {RoleKind::BlockInterior, ba};
    }
  }
  return LatticeGeometry(spec, GeometryKind::MagnifiedTorus, k, big, std::move(bonds),
                         std::move(roles));
}

BondCensus bond_census(const LatticeGeometry& geometry) {
  BondCensus c;
  c.k = geometry.k();
  c.blocks = geometry.block_count();
  c.interior_per_block.assign(c.blocks, 0);
  for (const BondRole& role : geometry.roles()) {
    switch (role.kind) {
      case RoleKind::BlockInterior:
        ++c.interior_per_block[static_cast<std::size_t>(role.block)];
        ++c.interior;
        break;
      case RoleKind::Cut: ++c.cut; break;
      case RoleKind::Corridor: ++c.corridor; break;
    }
  }
  c.cross_sections = geometry.base().cross_section_sum();
  c.surface_faces = geometry.base().surface_faces();
  return c;
}

}  // namespace sgsurf

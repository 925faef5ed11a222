#ifndef SGSURF_LATTICE_HPP
#define SGSURF_LATTICE_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace sgsurf {

/// Sides of a d-dimensional parallelepiped located at the origin.
struct LatticeSpec {
  int dim = 1;
  std::vector<int> sides;

  std::size_t volume() const;
  /// Sum over axes of |Lambda| / L_i (faces orthogonal to one axis).
  std::size_t cross_section_sum() const;
  /// Boundary-face count 2 * sum_i |Lambda| / L_i.
  std::size_t surface_faces() const { return 2 * cross_section_sum(); }
  LatticeSpec magnified(int k) const;

  bool operator==(const LatticeSpec&) const = default;
};

enum class GeometryKind { FreeBlock, Torus, MagnifiedTorus };

std::string to_string(GeometryKind kind);

/// Nearest-neighbour bond. `axis` is 0-based; site_a < site_b.
struct Bond {
  std::size_t site_a = 0;
  std::size_t site_b = 0;
  int axis = 0;
  bool wrap = false;

  bool operator==(const Bond&) const = default;
};

enum class RoleKind { BlockInterior, Cut, Corridor };

struct BondRole {
  RoleKind kind = RoleKind::BlockInterior;
  int block = 0;  // meaningful for BlockInterior only

  bool operator==(const BondRole&) const = default;
};

class LatticeGeometry {
 public:
  LatticeGeometry(LatticeSpec base, GeometryKind kind, int k, LatticeSpec actual,
                  std::vector<Bond> bonds, std::vector<BondRole> roles);

  /// The elementary box Lambda (before magnification).
  const LatticeSpec& base() const { return base_; }
  /// The box the spins actually live on (k * Lambda for magnified tori).
  const LatticeSpec& actual() const { return actual_; }
  GeometryKind kind() const { return kind_; }
  int k() const { return k_; }
  int dim() const { return base_.dim; }

  std::size_t site_count() const { return actual_.volume(); }
  std::size_t bond_count() const { return bonds_.size(); }
  std::size_t block_count() const;

  const std::vector<Bond>& bonds() const { return bonds_; }
  const std::vector<BondRole>& roles() const { return roles_; }

  std::vector<std::size_t> bonds_with_role(RoleKind kind) const;
  std::vector<std::size_t> block_bonds(int block) const;
  /// Block index of a site in a magnified torus, 0 otherwise.
  int block_of_site(std::size_t site) const;
  std::vector<int> coordinates(std::size_t site) const;
  std::vector<std::size_t> degrees() const;

 private:
  LatticeSpec base_;
  GeometryKind kind_;
  int k_;
  LatticeSpec actual_;
  std::vector<Bond> bonds_;
  std::vector<BondRole> roles_;
};

/// Throws std::invalid_argument naming the violated constraint.
void validate_spec(const LatticeSpec& spec, GeometryKind kind);

LatticeGeometry build_geometry(const LatticeSpec& spec, GeometryKind kind);

/// Wrap bonds of a torus; removing them unfolds it onto the free block.
std::vector<Bond> cut_set(const LatticeGeometry& torus);

/// Torus over k*Lambda, partitioned into k^d translated copies of Lambda.
LatticeGeometry magnified_partition(const LatticeSpec& spec, int k);

struct BondCensus {
  int k = 1;
  std::size_t blocks = 1;
  std::vector<std::size_t> interior_per_block;
  std::size_t interior = 0;
  std::size_t cut = 0;
  std::size_t corridor = 0;
  std::size_t surface_faces = 0;   // |dLambda| = 2 sum_i |Lambda|/L_i
  std::size_t cross_sections = 0;  // sum_i |Lambda|/L_i

  /// 2|C| = k^d |dLambda|, only meaningful for magnified tori.
  bool corridor_identity_holds() const { return 2 * corridor == blocks * surface_faces; }
};

BondCensus bond_census(const LatticeGeometry& geometry);

}  // namespace sgsurf

#endif  // SGSURF_LATTICE_HPP

#pragma once

#include "tpat/field.hpp"
#include "tpat/mesh.hpp"

namespace tpat {

/// Piecewise-linear interpolation of `field` (on `from`) at the nodes of `to`.
/// Throws ValidationError if a target node lies outside the source mesh.
NodalField transfer_field(const Mesh& from, const NodalField& field, const Mesh& to);

}  // namespace tpat

#pragma once

#include <iosfwd>
#include <string>

#include "omcat/fock.hpp"

namespace omcat {

// Density-operator text format `.qst`:
//   line 1: QSTv1
//   line 2: dims: d0 d1 [d2]
//   line 3: norm: <real>
//   then one line per nonzero element: i j re im   (flat row-major,
//   mode-0-major indices; elements with |value| <= 1e-14 are not emitted)
void write_qst(std::ostream& os, const DensityOperator& rho);
void write_qst_file(const std::string& path, const DensityOperator& rho);
DensityOperator read_qst(std::istream& is);
DensityOperator read_qst_file(const std::string& path);

}  // namespace omcat

#include "omcat/qst.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace omcat {

void write_qst(std::ostream& os, const DensityOperator& rho) {
  os << "QSTv1\n";
  os << "dims:";
  for (int m = 0; m < rho.dims().n_modes(); ++m) os << ' ' << rho.dims().dim(m);
  os << '\n';
  char buf[96];
  std::snprintf(buf, sizeof buf, "norm: %.17g\n", rho.norm());
  os << buf;
  const MatrixXcd& m = rho.matrix();
  for (long i = 0; i < m.rows(); ++i)
    for (long j = 0; j < m.cols(); ++j) {
      Complex v = m(i, j);
      if (std::abs(v) > 1e-14) {
        std::snprintf(buf, sizeof buf, "%ld %ld %.17g %.17g\n", i, j, v.real(), v.imag());
        os << buf;
      }
    }
}

void write_qst_file(const std::string& path, const DensityOperator& rho) {
  std::ofstream f(path);
  if (!f) throw InvalidArgumentError("write_qst_file: cannot open " + path);
  write_qst(f, rho);
}

DensityOperator read_qst(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "QSTv1")
    throw InvalidArgumentError("read_qst: missing QSTv1 header");
  if (!std::getline(is, line) || line.rfind("dims:", 0) != 0)
    throw InvalidArgumentError("read_qst: missing dims line");
  std::istringstream ds(line.substr(5));
  std::vector<int> dims;
  int d;
  while (ds >> d) dims.push_back(d);
  if (dims.empty()) throw InvalidArgumentError("read_qst: empty dims");
  FockDims fd(dims);
  if (!std::getline(is, line) || line.rfind("norm:", 0) != 0)
    throw InvalidArgumentError("read_qst: missing norm line");
  double norm = std::stod(line.substr(5));

  MatrixXcd m = MatrixXcd::Zero(fd.total(), fd.total());
  long i, j;
  double re, im;
  while (is >> i >> j >> re >> im) {
    if (i < 0 || i >= fd.total() || j < 0 || j >= fd.total())
      throw InvalidArgumentError("read_qst: element index out of range");
    m(i, j) = Complex(re, im);
  }
  return DensityOperator(fd, std::move(m), norm);
}

DensityOperator read_qst_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidArgumentError("read_qst_file: cannot open " + path);
  return read_qst(f);
}

}  // namespace omcat

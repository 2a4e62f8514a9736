// Reduced basis and y-search for one field given on the command line,
// e.g. sample_appendix_certificate 1 0 0 -1 -1
#include <iostream>

#include "covol/appendix.hpp"

using namespace covol;
using namespace covol::appendix;

int main(int argc, char** argv) {
  std::string line = argc > 1 ? "" : "1 0 0 -1 -1";
  for (int i = 1; i < argc; ++i) line += std::string(i > 1 ? " " : "") + argv[i];
  const Precision prec{30};
  auto K = FieldByPolynomial::from_polynomial(parse_polynomial(line), prec);
  auto c = certify_field(K, 2, prec);
  std::cout << "field      " << c.label << "  disc " << c.disc << "  signature (" << K.r1 << "," << K.r2 << ")\n";
  for (std::size_t i = 0; i < c.basis.basis.size(); ++i) {
    std::cout << "gamma_" << i + 1 << "    [";
    for (long v : c.basis.transform[i]) std::cout << " " << v;
    std::cout << " ]  norm " << c.basis.norms[i].to_string(10) << "\n";
  }
  std::cout << "prod/sqrtD " << c.basis.product_ratio.to_string(10) << "\n";
  if (c.y) {
    std::cout << "y coeffs  ";
    for (const auto& row : c.y->coefficients)
      for (long v : row) std::cout << " " << v;
    std::cout << "  (" << c.y->tried << " tried)\n";
    std::cout << "||y||      " << c.y->norm.to_string(10) << " <= " << c.y->bound.to_string(10) << "\n";
  }
  std::cout << "certified  " << (c.ok ? "yes" : "no") << "\n";
  return c.ok ? 0 : 1;
}

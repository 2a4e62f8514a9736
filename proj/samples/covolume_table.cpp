// Covolumes of split groups over Q and a few imaginary quadratic fields.
#include <iostream>

#include "covol/covolume.hpp"

using namespace covol;

int main() {
  const Precision prec{25};
  for (auto [family, rank] : {std::pair{Family::A, 2}, {Family::B, 2}, {Family::G2, 2}, {Family::F4, 4}}) {
    auto g = group_data(family, rank);
    for (long D : {1L, -3L, -4L, -7L}) {
      auto vb = covolume(g, ExtensionPair::inner(BaseField::from_disc(D)), prec);
      std::cout << g.name() << "  D=" << D << "  " << vb.total.to_string(15) << "\n";
    }
  }
}

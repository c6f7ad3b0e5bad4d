// constants.hpp — physical scale constants (natural units by default)

#pragma once

#include <stdexcept>

namespace openbath {

struct Constants {
    double hbar{1.0};
    double k_B{1.0};

    void check() const {
        if (!(hbar > 0.0) || !(k_B > 0.0))
            throw std::invalid_argument("Constants: hbar and k_B must be positive");
    }
};

}  // namespace openbath

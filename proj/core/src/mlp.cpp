#include "ecosim/mlp.hpp"

namespace ecosim {

template class Mlp<float>;
template class Mlp<double>;

}  // namespace ecosim

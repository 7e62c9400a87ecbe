#include "trainlab/version.hpp"

#ifndef TRAINLAB_VERSION
#define TRAINLAB_VERSION "dev"
#endif

namespace trainlab {

std::string_view version() { return TRAINLAB_VERSION; }

}  // namespace trainlab

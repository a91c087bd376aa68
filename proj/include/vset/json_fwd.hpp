#ifndef VSET_JSON_FWD_HPP
#define VSET_JSON_FWD_HPP

#include <nlohmann/json_fwd.hpp>

#endif

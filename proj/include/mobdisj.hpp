#pragma once

#include "mobdisj/arith.hpp"
#include "mobdisj/bsz.hpp"
#include "mobdisj/char_sums.hpp"
#include "mobdisj/error.hpp"
#include "mobdisj/field.hpp"
#include "mobdisj/fp2.hpp"
#include "mobdisj/group.hpp"
#include "mobdisj/mobius_map.hpp"
#include "mobdisj/rational_function.hpp"
#include "mobdisj/sampling.hpp"
#include "mobdisj/summation.hpp"

#pragma once

#include "fitchain/error.hpp"
#include "fitchain/gallery.hpp"
#include "fitchain/io.hpp"
#include "fitchain/mixing.hpp"
#include "fitchain/oracle.hpp"
#include "fitchain/params.hpp"
#include "fitchain/poisson.hpp"
#include "fitchain/profile.hpp"
#include "fitchain/rational.hpp"
#include "fitchain/state_space.hpp"
#include "fitchain/transition.hpp"

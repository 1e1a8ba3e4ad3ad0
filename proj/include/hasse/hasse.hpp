#pragma once

#include "hasse/descent.hpp"
#include "hasse/error.hpp"
#include "hasse/forms.hpp"
#include "hasse/integer.hpp"
#include "hasse/pipeline.hpp"
#include "hasse/primes.hpp"
#include "hasse/ring.hpp"
#include "hasse/serialize.hpp"
#include "hasse/solubility.hpp"
#include "hasse/units.hpp"

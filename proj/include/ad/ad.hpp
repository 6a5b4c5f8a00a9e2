#pragma once

#include "ad/api.hpp"
#include "ad/errors.hpp"
#include "ad/linalg.hpp"
#include "ad/numdiff.hpp"
#include "ad/real.hpp"
#include "ad/scalar.hpp"
#include "ad/tag.hpp"
#include "ad/tape.hpp"

#pragma once

#include "dopt/block.hpp"
#include "dopt/catalog.hpp"
#include "dopt/family.hpp"
#include "dopt/matrices.hpp"
#include "dopt/modring.hpp"
#include "dopt/params.hpp"
#include "dopt/search.hpp"

#pragma once

#include "spcg/cg.hpp"
#include "spcg/errors.hpp"
#include "spcg/genprob.hpp"
#include "spcg/kernels.hpp"
#include "spcg/matio.hpp"
#include "spcg/sparse.hpp"

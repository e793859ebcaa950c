#pragma once

// Everything at once.

#include "klucas/error.hpp"
#include "klucas/mp.hpp"
#include "klucas/sequence.hpp"
#include "klucas/algebraic.hpp"
#include "klucas/digits.hpp"
#include "klucas/parallel.hpp"
#include "klucas/search.hpp"
#include "klucas/expr.hpp"
#include "klucas/cfrac.hpp"
#include "klucas/lattice.hpp"
#include "klucas/certificate.hpp"
#include "klucas/linforms.hpp"
#include "klucas/reduction.hpp"
#include "klucas/pipeline.hpp"

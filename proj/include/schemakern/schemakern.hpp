#pragma once

#include "errors.hpp"
#include "terms.hpp"
#include "rewrite.hpp"
#include "calculus.hpp"
#include "schema.hpp"
#include "psk.hpp"
#include "evaluation.hpp"
#include "translate.hpp"
#include "herbrand.hpp"

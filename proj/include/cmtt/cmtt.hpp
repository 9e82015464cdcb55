#pragma once

#include "cmtt/circ.hpp"
#include "cmtt/error.hpp"
#include "cmtt/extraction.hpp"
#include "cmtt/frontend.hpp"
#include "cmtt/parse.hpp"
#include "cmtt/print.hpp"
#include "cmtt/reduce.hpp"
#include "cmtt/stlc.hpp"
#include "cmtt/subst.hpp"
#include "cmtt/syntax.hpp"
#include "cmtt/typecheck.hpp"

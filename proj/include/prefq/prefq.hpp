#ifndef PREFQ_PREFQ_HPP_
#define PREFQ_PREFQ_HPP_

#include "prefq/algebra.hpp"
#include "prefq/closure.hpp"
#include "prefq/compatibility.hpp"
#include "prefq/dnf.hpp"
#include "prefq/errors.hpp"
#include "prefq/formula.hpp"
#include "prefq/instance.hpp"
#include "prefq/parser.hpp"
#include "prefq/preference_formula.hpp"
#include "prefq/qe.hpp"
#include "prefq/restriction.hpp"
#include "prefq/sat.hpp"
#include "prefq/schema.hpp"
#include "prefq/session.hpp"
#include "prefq/value.hpp"
#include "prefq/winnow.hpp"

#endif // PREFQ_PREFQ_HPP_

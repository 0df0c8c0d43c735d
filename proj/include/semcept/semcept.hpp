#ifndef SEMCEPT_SEMCEPT_HPP
#define SEMCEPT_SEMCEPT_HPP

#include "embedding.hpp"
#include "errors.hpp"
#include "lexicon.hpp"
#include "random.hpp"
#include "segment.hpp"
#include "sgns.hpp"
#include "simcore.hpp"
#include "sn_model.hpp"
#include "text.hpp"
#include "version.hpp"
#include "walker.hpp"
#include "wsd.hpp"

#endif  // SEMCEPT_SEMCEPT_HPP

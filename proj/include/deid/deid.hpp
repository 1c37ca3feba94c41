// deid.hpp -- umbrella header.

#ifndef DEID_DEID_HPP
#define DEID_DEID_HPP

#include "deid/config.hpp"
#include "deid/core.hpp"
#include "deid/crf.hpp"
#include "deid/features.hpp"
#include "deid/gazetteer.hpp"
#include "deid/io.hpp"
#include "deid/masking.hpp"
#include "deid/metrics.hpp"
#include "deid/pipeline.hpp"
#include "deid/recognizer.hpp"
#include "deid/rng.hpp"
#include "deid/synthetic.hpp"
#include "deid/tokenize.hpp"
#include "deid/unicode.hpp"

#endif  // DEID_DEID_HPP

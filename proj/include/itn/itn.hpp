#pragma once

#include "itn/country.hpp"
#include "itn/error.hpp"
#include "itn/geo.hpp"
#include "itn/gravity/design.hpp"
#include "itn/gravity/estimation.hpp"
#include "itn/gravity/glm.hpp"
#include "itn/gravity/report.hpp"
#include "itn/gravity/selection.hpp"
#include "itn/io/artifacts.hpp"
#include "itn/io/csv.hpp"
#include "itn/io/export.hpp"
#include "itn/io/fixture.hpp"
#include "itn/mst.hpp"
#include "itn/network.hpp"
#include "itn/pipeline.hpp"
#include "itn/residual.hpp"
#include "itn/stats/area_shares.hpp"
#include "itn/stats/correlation.hpp"
#include "itn/stats/distribution.hpp"
#include "itn/stats/kernel.hpp"
#include "itn/synthetic.hpp"
#include "itn/topology.hpp"

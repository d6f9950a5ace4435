#pragma once

#define VSLOW_VERSION "1.0.0"

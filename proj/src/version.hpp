#pragma once

#define CRITNLS_VERSION "0.1.0"

from .source import (FunDef, SourceSyntaxException, SourceType, UnsupportedConstructException, parse_source,
                     read_source)
from .translate import (CataFun, TranslationException, build_manifest, function_modes, recognize_cata,
                        translate_contracts, translate_program)

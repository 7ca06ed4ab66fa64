// Payloads captured verbatim from the stub-backed service (scripts/make_demo.py).
export const fixtures = {
  "datasets": [
    {
      "name": "demo",
      "gui_count": 12,
      "dimensions": [
        {
          "id": "domain",
          "name": "Domain",
          "description": "The application domain or business area the screen belongs to, such as food delivery, banking, fitness, travel booking, or social networking.",
          "default_weight": 1.0
        },
        {
          "id": "functionality",
          "name": "Functionality",
          "description": "What the screen lets the user do: the tasks, features, and interactions it supports, such as logging in, searching products, tracking an order, or checking out.",
          "default_weight": 1.0
        },
        {
          "id": "design",
          "name": "Design",
          "description": "The visual style of the screen: color palette, light or dark theme, typography, imagery, layout density, and overall aesthetic.",
          "default_weight": 1.0
        },
        {
          "id": "gui_components",
          "name": "GUI components",
          "description": "The interface elements visible on the screen, such as buttons, input fields, lists, cards, navigation bars, tabs, sliders, and dialogs.",
          "default_weight": 1.0
        },
        {
          "id": "displayed_text",
          "name": "Displayed text",
          "description": "The literal text visible on the screen: headings, labels, button captions, and other on-screen copy.",
          "default_weight": 1.0
        }
      ]
    }
  ],
  "search": {
    "dataset": "demo",
    "query": "travel booking app, modern looking design, not dark",
    "decomposition": {
      "domain": {
        "positive": [
          "travel booking app"
        ],
        "negative": []
      },
      "functionality": {
        "positive": [],
        "negative": []
      },
      "design": {
        "positive": [
          "modern"
        ],
        "negative": [
          "dark"
        ]
      },
      "gui_components": {
        "positive": [],
        "negative": []
      },
      "displayed_text": {
        "positive": [],
        "negative": []
      }
    },
    "results": [
      {
        "gui_id": "gui_001",
        "total": 0.12483798563053294,
        "per_dimension": {
          "domain": {
            "pos": -0.04010141851999151,
            "neg": 0.0,
            "s": -0.04010141851999151
          },
          "design": {
            "pos": 0.1668120774649794,
            "neg": -0.12296531231607796,
            "s": 0.2897773897810574
          }
        }
      },
      {
        "gui_id": "gui_009",
        "total": 0.10823187448336816,
        "per_dimension": {
          "domain": {
            "pos": 0.1713171342711049,
            "neg": 0.0,
            "s": 0.1713171342711049
          },
          "design": {
            "pos": 0.10354425661842336,
            "neg": 0.058397641922791926,
            "s": 0.04514661469563143
          }
        }
      },
      {
        "gui_id": "gui_011",
        "total": 0.06656721606786228,
        "per_dimension": {
          "domain": {
            "pos": 0.23566639497604072,
            "neg": 0.0,
            "s": 0.23566639497604072
          },
          "design": {
            "pos": 0.10594742842301744,
            "neg": 0.2084793912633336,
            "s": -0.10253196284031615
          }
        }
      },
      {
        "gui_id": "gui_003",
        "total": 0.05051741854752469,
        "per_dimension": {
          "domain": {
            "pos": 0.04660771430262715,
            "neg": 0.0,
            "s": 0.04660771430262715
          },
          "design": {
            "pos": -0.10588289530886891,
            "neg": -0.16031001810129114,
            "s": 0.05442712279242223
          }
        }
      },
      {
        "gui_id": "gui_004",
        "total": 0.049441411634607885,
        "per_dimension": {
          "domain": {
            "pos": 0.051308312827488545,
            "neg": 0.0,
            "s": 0.051308312827488545
          },
          "design": {
            "pos": 0.01161230244488387,
            "neg": -0.03596220799684335,
            "s": 0.04757451044172722
          }
        }
      },
      {
        "gui_id": "gui_010",
        "total": 0.03328936294293851,
        "per_dimension": {
          "domain": {
            "pos": -0.02399095045335619,
            "neg": 0.0,
            "s": -0.02399095045335619
          },
          "design": {
            "pos": 0.1406903443105175,
            "neg": 0.0501206679712843,
            "s": 0.0905696763392332
          }
        }
      },
      {
        "gui_id": "gui_007",
        "total": -0.002896923756277002,
        "per_dimension": {
          "domain": {
            "pos": 0.11899475308300667,
            "neg": 0.0,
            "s": 0.11899475308300667
          },
          "design": {
            "pos": -0.10735002481579936,
            "neg": 0.01743857577976131,
            "s": -0.12478860059556067
          }
        }
      },
      {
        "gui_id": "gui_006",
        "total": -0.022156256219475916,
        "per_dimension": {
          "domain": {
            "pos": -0.029740935888397418,
            "neg": 0.0,
            "s": -0.029740935888397418
          },
          "design": {
            "pos": 0.09636567775040711,
            "neg": 0.11093725430096152,
            "s": -0.01457157655055441
          }
        }
      }
    ],
    "usage": {
      "input_tokens": 431,
      "output_tokens": 70,
      "wall_time": 0.0,
      "request_count": 3,
      "model": "stub-chat",
      "cost": 0.0
    }
  },
  "searchReweighted": {
    "dataset": "demo",
    "query": "travel booking app, modern looking design, not dark",
    "decomposition": {
      "domain": {
        "positive": [
          "travel booking app"
        ],
        "negative": []
      },
      "functionality": {
        "positive": [],
        "negative": []
      },
      "design": {
        "positive": [
          "modern"
        ],
        "negative": [
          "dark"
        ]
      },
      "gui_components": {
        "positive": [],
        "negative": []
      },
      "displayed_text": {
        "positive": [],
        "negative": []
      }
    },
    "results": [
      {
        "gui_id": "gui_011",
        "total": 0.22903505462670043,
        "per_dimension": {
          "domain": {
            "pos": 0.23566639497604072,
            "neg": 0.0,
            "s": 0.23566639497604072
          },
          "design": {
            "pos": 0.10594742842301744,
            "neg": 0.2084793912633336,
            "s": -0.10253196284031615
          }
        }
      },
      {
        "gui_id": "gui_009",
        "total": 0.16884320251472307,
        "per_dimension": {
          "domain": {
            "pos": 0.1713171342711049,
            "neg": 0.0,
            "s": 0.1713171342711049
          },
          "design": {
            "pos": 0.10354425661842336,
            "neg": 0.058397641922791926,
            "s": 0.04514661469563143
          }
        }
      },
      {
        "gui_id": "gui_007",
        "total": 0.11421468732460338,
        "per_dimension": {
          "domain": {
            "pos": 0.11899475308300667,
            "neg": 0.0,
            "s": 0.11899475308300667
          },
          "design": {
            "pos": -0.10735002481579936,
            "neg": 0.01743857577976131,
            "s": -0.12478860059556067
          }
        }
      },
      {
        "gui_id": "gui_008",
        "total": 0.07184707275301261,
        "per_dimension": {
          "domain": {
            "pos": 0.07654428370860517,
            "neg": 0.0,
            "s": 0.07654428370860517
          },
          "design": {
            "pos": 0.0848372620679533,
            "neg": 0.24785073709456873,
            "s": -0.16301347502661542
          }
        }
      },
      {
        "gui_id": "gui_004",
        "total": 0.05123510101600304,
        "per_dimension": {
          "domain": {
            "pos": 0.051308312827488545,
            "neg": 0.0,
            "s": 0.051308312827488545
          },
          "design": {
            "pos": 0.01161230244488387,
            "neg": -0.03596220799684335,
            "s": 0.04757451044172722
          }
        }
      },
      {
        "gui_id": "gui_003",
        "total": 0.04676103603772117,
        "per_dimension": {
          "domain": {
            "pos": 0.04660771430262715,
            "neg": 0.0,
            "s": 0.04660771430262715
          },
          "design": {
            "pos": -0.10588289530886891,
            "neg": -0.16031001810129114,
            "s": 0.05442712279242223
          }
        }
      },
      {
        "gui_id": "gui_005",
        "total": 0.004721000336698743,
        "per_dimension": {
          "domain": {
            "pos": 0.006859331687920598,
            "neg": 0.0,
            "s": 0.006859331687920598
          },
          "design": {
            "pos": -0.1019004745103454,
            "neg": 0.0002950927140485671,
            "s": -0.10219556722439396
          }
        }
      },
      {
        "gui_id": "gui_000",
        "total": 0.003932301378773375,
        "per_dimension": {
          "domain": {
            "pos": 0.005403348953625528,
            "neg": 0.0,
            "s": 0.005403348953625528
          },
          "design": {
            "pos": -0.205507564268503,
            "neg": -0.13588748690466868,
            "s": -0.06962007736383433
          }
        }
      }
    ],
    "usage": {
      "input_tokens": 431,
      "output_tokens": 70,
      "wall_time": 0.0,
      "request_count": 3,
      "model": "stub-chat",
      "cost": 0.0
    }
  },
  "rerank": {
    "dataset": "demo",
    "query": "travel booking app, modern looking design, not dark",
    "mode": "text",
    "k": 4,
    "results": [
      {
        "gui_id": "gui_001",
        "stage": "reranked",
        "aggregate": 0.662,
        "scores": {
          "domain": 44,
          "functionality": 88,
          "design": 61,
          "gui_components": 100,
          "displayed_text": 38
        },
        "flags": []
      },
      {
        "gui_id": "gui_003",
        "stage": "reranked",
        "aggregate": 0.476,
        "scores": {
          "domain": 44,
          "functionality": 57,
          "design": 62,
          "gui_components": 24,
          "displayed_text": 51
        },
        "flags": []
      },
      {
        "gui_id": "gui_011",
        "stage": "reranked",
        "aggregate": 0.384,
        "scores": {
          "domain": 84,
          "functionality": 23,
          "design": 35,
          "gui_components": 43,
          "displayed_text": 7
        },
        "flags": []
      },
      {
        "gui_id": "gui_009",
        "stage": "reranked",
        "aggregate": 0.27,
        "scores": {
          "domain": 16,
          "functionality": 20,
          "design": 46,
          "gui_components": 22,
          "displayed_text": 31
        },
        "flags": []
      },
      {
        "gui_id": "gui_004",
        "stage": "embedding",
        "total": 0.049441411634607885
      },
      {
        "gui_id": "gui_010",
        "stage": "embedding",
        "total": 0.03328936294293851
      },
      {
        "gui_id": "gui_007",
        "stage": "embedding",
        "total": -0.002896923756277002
      },
      {
        "gui_id": "gui_006",
        "stage": "embedding",
        "total": -0.022156256219475916
      },
      {
        "gui_id": "gui_000",
        "stage": "embedding",
        "total": -0.0321083642051044
      },
      {
        "gui_id": "gui_008",
        "stage": "embedding",
        "total": -0.04323459565900513
      },
      {
        "gui_id": "gui_005",
        "stage": "embedding",
        "total": -0.047668117768236686
      },
      {
        "gui_id": "gui_002",
        "stage": "embedding",
        "total": -0.08447188740317585
      }
    ],
    "stage1_usage": {
      "input_tokens": 431,
      "output_tokens": 70,
      "wall_time": 0.0,
      "request_count": 3,
      "model": "stub-chat",
      "cost": 0.0
    },
    "usage": {
      "input_tokens": 1644,
      "output_tokens": 96,
      "wall_time": 0.0,
      "request_count": 4,
      "model": "stub-chat",
      "cost": 0.0
    }
  }
} as const;

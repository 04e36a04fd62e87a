from .loaders import (ATTRIBUTES_FILE, ITEMS_FILE, TAXONOMY_FILE,  # noqa: F401
                      TRANSACTIONS_FILE, Loaded, dump_dataset,
                      load_attributes, load_dataset, load_items,
                      load_taxonomy, load_transactions, link_dataset)
from .schema import (TABLE_CATEGORIES, UNMAPPED, AttributeTable,  # noqa: F401
                     Dataset, DateWindow, ItemRecord, Taxonomy,
                     TaxonomyEntry, TransactionRecord, Zone)

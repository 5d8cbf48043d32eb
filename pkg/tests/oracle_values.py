"""Reference values computed by tests/oracle_gen.py with mpmath (do not edit by hand)."""

BESSEL_S = [
    (0.2, 0.9746526813225317),
    (0.23899174439622947, 0.9591986163638742),
    (0.2855852694477634, 0.9386897329706282),
    (0.341262608595941, 0.9130683752049091),
    (0.4077947306277581, 0.8826407777973417),
    (0.4872978701415921, 0.848006874623316),
    (0.582300840128532, 0.8099623058232617),
    (0.695825467728539, 0.7693976115621943),
    (0.831482711638829, 0.7272114811193856),
    (0.9935875184493542, 0.6842461158456447),
    (1.18729607122266, 0.6412459105058902),
    (1.4187697958814671, 0.5988365097679742),
    (1.695371342071971, 0.5575194981148425),
    (2.0258987722057853, 0.517677777188996),
    (2.4208654076982006, 0.479587344391079),
    (2.8928342336714117, 0.44343217499114634),
    (3.4568174987713007, 0.40931990428932113),
    (4.130754220453819, 0.3772968498428468),
    (4.936080784091729, 0.3473615568435595),
    (5.898412785353951, 0.31947650087051715),
    (7.048359803703817, 0.29357787498174504),
    (8.4224990230972, 0.2695835618255204),
    (10.0645386685277, 0.24739948194194852),
    (12.026708264673696, 0.22692454538439796),
    (14.37141993759458, 0.2080544364263607),
    (17.173253601682397, 0.19068444516340174),
    (20.521329176124542, 0.17471153495454572),
    (24.52214128565621, 0.1600358068850377),
    (29.30294661094887, 0.14656149525638654),
    (35.01581163250125, 0.13419760334147984),
    (41.84244951750631, 0.12285826706234494),
    (50.0, 0.1124629160182849),
]

BESSEL_DENS = [
    (0.5, 0.4151074974205947),
    (1.0, 0.24197072451914334),
    (2.0, 0.1098478223669306),
    (10.0, 0.01200038948430136),
]

KILLED_S = [
    (0.5, 0.6029921258866955),
    (1.8, 0.3353794540044066),
    (3.1, 0.2521050283222883),
    (4.4, 0.20852557244841127),
    (5.7, 0.1808578245698787),
    (7.0, 0.16138184002505063),
    (8.3, 0.14675649343102615),
    (9.6, 0.13527489185410368),
    (10.9, 0.12596416331753416),
    (12.2, 0.1182247487568774),
    (13.5, 0.11166479947455406),
    (14.8, 0.10601620105159992),
    (16.1, 0.1010886185349729),
    (17.4, 0.09674278206604936),
    (18.7, 0.09287417459369045),
    (20.0, 0.08940265596126558),
]

KILLED_DENS = [
    (0.5, 0.46386376593274214),
    (1.8, 0.09533401589228169),
    (3.1, 0.04362160635132333),
    (4.4, 0.025918219233194983),
    (5.7, 0.0175366048062332),
    (7.0, 0.012826963741369624),
    (8.3, 0.009882532494149754),
    (9.6, 0.007902064401342722),
    (10.9, 0.006497049583750301),
    (12.2, 0.005458971673963063),
    (13.5, 0.0046670731587510755),
    (14.8, 0.00404715243144819),
    (16.1, 0.0035513972927843137),
    (17.4, 0.003147775666113859),
    (18.7, 0.00281411726061403),
    (20.0, 0.002534647599638313),
]

KILLED_S_BETA = [
    (0.5, 0.46386376593274214),
    (2.0, 0.08219045413462465),
    (20.0, 0.002534647599638313),
]

KILLED_C = 0.5002309584299972

SAW_S = [
    (0.5, 0.908278886688428),
    (0.5800776508699859, 0.8924862274425521),
    (0.6729801620776823, 0.8747931902329785),
    (0.7807615030002485, 0.8551767245995281),
    (0.9058045971002071, 0.8336598990152684),
    (1.0508740056662442, 0.8103151280516366),
    (1.2191770491344143, 0.7852643845252864),
    (1.4144347173129845, 0.7586761813654552),
    (1.640963936255737, 0.7307594924820964),
    (1.9037730106111865, 0.7017551505876406),
    (2.208672351570035, 0.6719255428107942),
    (2.5624029384804667, 0.6415435730876344),
    (2.9727853542721956, 0.6108818575950206),
    (3.448892689693828, 0.5802029835734358),
    (4.001251139080525, 0.5497514352175538),
    (4.642072722597372, 0.5197475256533649),
    (5.385525280183845, 0.49038342020600645),
    (6.2480457064599335, 0.46182112835340133),
    (7.248703351863162, 0.43419219777926094),
    (8.409621624404348, 0.4075987658396691),
    (9.756467113179816, 0.38211560246769616),
    (11.319017047607238, 0.35779279928961916),
    (13.131817638266664, 0.3346588066506444),
    (15.234947854517541, 0.3127235794368451),
    (17.67490552515053, 0.29198165353802313),
    (20.5056353527565, 0.2724150306925494),
    (23.789721570047057, 0.25399579664156907),
    (27.599771606407852, 0.23668843473670506),
    (32.0200213559864, 0.22045182470223054),
    (37.14819753797473, 0.2052409353371598),
    (43.09767832376516, 0.19100823211131301),
    (50.0, 0.17770482745591415),
]

SAW_DENS = [
    (0.5, 0.2000702924793569),
    (1.0, 0.15915494309189535),
    (5.0, 0.039542363523176506),
    (50.0, 0.0017307118726587968),
]

SAW_LAPLACE = [
    (0.5, 0.24842860665762814),
    (1.0, 0.15437156137190844),
    (2.0, 0.08525089062597535),
]

SAW_I_RHO = [
    ((0.5, -0.4), 0.8029786612406233),
    ((0.5, 0.2), 1.163011176205005),
    ((0.5, 0.45), 1.5144938364594691),
    ((1.3, -0.4), 0.559648483634004),
    ((1.3, 0.2), 1.473865540676541),
    ((1.3, 0.45), 2.8396368284202373),
    ((2.5, -0.4), 0.31584062196307094),
    ((2.5, 0.2), 2.0833333333333335),
    ((2.5, 0.45), 6.912096168294516),
]

SAW_O_FAR = [
    ((0.5, 3.0), 0.4272998940390363),
    ((0.5, 30.0), 0.14303736326934352),
    ((0.5, 300.0), 0.04534129516423878),
    ((1.5, 3.0), 0.0625),
    ((1.5, 30.0), 0.001040582726326743),
    ((1.5, 300.0), 1.1037405768148255e-05),
]

STABLE_CDF = [
    (0.5, 0.5607666436192782),
    (1.0, 0.7331825695309513),
    (2.0, 0.8792312743768923),
]

WRIGHT_M1 = 2.6596921569656993

BESSEL_EXIT = 0.6176568031829365

BESSEL_HITTING = 0.8588775578822688

BESSELI0_2 = 2.2795853023360673

ERF_HALF_SQRT2 = 0.6826894921370859

